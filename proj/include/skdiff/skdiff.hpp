#pragma once

#include "skdiff/analysis.hpp"
#include "skdiff/corpus.hpp"
#include "skdiff/difftree.hpp"
#include "skdiff/error.hpp"
#include "skdiff/export.hpp"
#include "skdiff/ingest.hpp"
#include "skdiff/leadsheet.hpp"
#include "skdiff/pitch_time.hpp"
#include "skdiff/segmenter.hpp"
#include "skdiff/skreduce.hpp"
