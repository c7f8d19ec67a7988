#pragma once

// Umbrella header.

#include "supportive/agreement/annotation.hpp"
#include "supportive/corpus/corpus.hpp"
#include "supportive/corpus/country.hpp"
#include "supportive/corpus/jaccard.hpp"
#include "supportive/corpus/partition.hpp"
#include "supportive/corpus/record.hpp"
#include "supportive/corpus/text.hpp"
#include "supportive/error.hpp"
#include "supportive/experiments/analytics.hpp"
#include "supportive/experiments/evaluation.hpp"
#include "supportive/linear/metrics.hpp"
#include "supportive/linear/model.hpp"
#include "supportive/linear/model_io.hpp"
#include "supportive/linear/scorer_training.hpp"
#include "supportive/linear/sparse.hpp"
#include "supportive/linear/vocabulary.hpp"
#include "supportive/pipeline/artifacts.hpp"
#include "supportive/pipeline/commands.hpp"
#include "supportive/pipeline/config.hpp"
#include "supportive/scoring/hub.hpp"
#include "supportive/scoring/score_table.hpp"
#include "supportive/scoring/scorer.hpp"
#include "supportive/weaklabel/dataset.hpp"
#include "supportive/weaklabel/informed.hpp"
#include "supportive/weaklabel/pair_rate.hpp"
#include "supportive/weaklabel/sampling.hpp"
