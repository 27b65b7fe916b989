#pragma once

#include "confsel/error.hpp"
#include "confsel/data.hpp"
#include "confsel/csv.hpp"
#include "confsel/glm.hpp"
#include "confsel/penalty.hpp"
#include "confsel/joint_likelihood.hpp"
#include "confsel/selector.hpp"
#include "confsel/parallel.hpp"
#include "confsel/ate.hpp"
#include "confsel/sim.hpp"
