#pragma once

#include "clir/analysis.hpp"
#include "clir/dense_index.hpp"
#include "clir/eval.hpp"
#include "clir/fusion.hpp"
#include "clir/io.hpp"
#include "clir/prf.hpp"
#include "clir/rerank.hpp"
#include "clir/sparse_index.hpp"
#include "clir/types.hpp"
#include "clir/version.hpp"
