#pragma once

#include "coherelint/baseline.hpp"
#include "coherelint/config.hpp"
#include "coherelint/corpus.hpp"
#include "coherelint/embedding.hpp"
#include "coherelint/error.hpp"
#include "coherelint/eval.hpp"
#include "coherelint/interpret.hpp"
#include "coherelint/matrix.hpp"
#include "coherelint/neurnet.hpp"
#include "coherelint/tokenizer.hpp"
