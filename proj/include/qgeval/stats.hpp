#pragma once

#include "qgeval/stats/correlation.hpp"
#include "qgeval/stats/distributions.hpp"
#include "qgeval/stats/rank.hpp"
#include "qgeval/stats/test_result.hpp"
#include "qgeval/stats/wilcoxon.hpp"
#include "qgeval/stats/williams.hpp"
