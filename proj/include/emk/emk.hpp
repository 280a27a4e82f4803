#pragma once

// Umbrella for the core library. emk/report.hpp (JSON reports, manifests) is
// not included here: it needs the vendored json.hpp, which pure grid/field
// consumers should not have to provide.
#include "emk/convolve.hpp"
#include "emk/error.hpp"
#include "emk/field.hpp"
#include "emk/grid.hpp"
#include "emk/io.hpp"
#include "emk/kernel.hpp"
#include "emk/oracle.hpp"
#include "emk/shape.hpp"
#include "emk/stroke.hpp"
