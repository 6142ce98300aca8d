#pragma once

#include "regent/error.hpp"

#include "regent/automata/builders.hpp"
#include "regent/automata/dfa.hpp"
#include "regent/automata/io.hpp"

#include "regent/complexity/counting.hpp"
#include "regent/complexity/eigen.hpp"
#include "regent/complexity/entropy.hpp"

#include "regent/datagen/dataset.hpp"
#include "regent/datagen/protocols.hpp"
#include "regent/datagen/sampling.hpp"

#include "regent/neural/cell.hpp"
#include "regent/neural/checkpoint.hpp"
#include "regent/neural/construct.hpp"
#include "regent/neural/forward.hpp"
#include "regent/neural/optim.hpp"

#include "regent/harness/config.hpp"
#include "regent/harness/grid.hpp"
#include "regent/harness/metrics.hpp"
#include "regent/harness/train.hpp"
