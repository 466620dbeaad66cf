#pragma once

#include "copies_lab/certificate.hpp"
#include "copies_lab/constructions.hpp"
#include "copies_lab/core.hpp"
#include "copies_lab/discrepancy.hpp"
#include "copies_lab/geometry_kernel.hpp"
#include "copies_lab/measure_estimation.hpp"
#include "copies_lab/numeric.hpp"
#include "copies_lab/pattern_search.hpp"
#include "copies_lab/sampling.hpp"
#include "copies_lab/serialization.hpp"
#include "copies_lab/set_oracle.hpp"
