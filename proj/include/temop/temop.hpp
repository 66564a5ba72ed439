#pragma once

#include "temop/error.hpp"
#include "temop/series.hpp"
#include "temop/train.hpp"
#include "temop/infer.hpp"
#include "temop/metrics.hpp"
#include "temop/eval.hpp"
#include "temop/data_io.hpp"
#include "temop/report.hpp"
