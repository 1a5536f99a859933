#pragma once

#include "qgeval/answerability.hpp"
#include "qgeval/bertscore.hpp"
#include "qgeval/bridge_client.hpp"
#include "qgeval/corpus.hpp"
#include "qgeval/error.hpp"
#include "qgeval/human_eval.hpp"
#include "qgeval/io.hpp"
#include "qgeval/meteor.hpp"
#include "qgeval/overlap.hpp"
#include "qgeval/qascore.hpp"
#include "qgeval/random.hpp"
#include "qgeval/stats.hpp"
#include "qgeval/text.hpp"
