#pragma once

#include "capindex/constraint.hpp"
#include "capindex/errors.hpp"
#include "capindex/report.hpp"
#include "capindex/roots.hpp"
#include "capindex/spectral.hpp"
#include "capindex/surface.hpp"
#include "capindex/upsilon.hpp"
