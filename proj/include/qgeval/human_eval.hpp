#pragma once

#include "qgeval/human_eval/correlate.hpp"
#include "qgeval/human_eval/hit.hpp"
#include "qgeval/human_eval/pipeline.hpp"
#include "qgeval/human_eval/qc.hpp"
#include "qgeval/human_eval/significance.hpp"
#include "qgeval/human_eval/simulate.hpp"
#include "qgeval/human_eval/standardize.hpp"
#include "qgeval/human_eval/types.hpp"
