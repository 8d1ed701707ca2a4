#pragma once

#include "kernmem/common.hpp"
#include "kernmem/dynamics.hpp"
#include "kernmem/experiments.hpp"
#include "kernmem/features.hpp"
#include "kernmem/io.hpp"
#include "kernmem/kernels.hpp"
#include "kernmem/parallel.hpp"
#include "kernmem/patterns.hpp"
#include "kernmem/report.hpp"
#include "kernmem/rng.hpp"
#include "kernmem/special.hpp"
#include "kernmem/theory.hpp"
#include "kernmem/training.hpp"
