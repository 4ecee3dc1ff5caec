#pragma once

#include "poolbench/agreement.hpp"
#include "poolbench/assemble.hpp"
#include "poolbench/efficiency.hpp"
#include "poolbench/error.hpp"
#include "poolbench/events.hpp"
#include "poolbench/io.hpp"
#include "poolbench/labels.hpp"
#include "poolbench/measures.hpp"
#include "poolbench/pooling.hpp"
#include "poolbench/rankstats.hpp"
#include "poolbench/robustness.hpp"
#include "poolbench/special.hpp"
#include "poolbench/types.hpp"
