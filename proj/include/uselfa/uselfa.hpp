#pragma once

#include "uselfa/composite.hpp"
#include "uselfa/datamodel.hpp"
#include "uselfa/engine.hpp"
#include "uselfa/errors.hpp"
#include "uselfa/format.hpp"
#include "uselfa/linalg.hpp"
#include "uselfa/report.hpp"
#include "uselfa/synth.hpp"
