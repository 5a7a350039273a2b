#pragma once

#include "l1rates/certificates.hpp"
#include "l1rates/circle_grid.hpp"
#include "l1rates/config.hpp"
#include "l1rates/errors.hpp"
#include "l1rates/experiment.hpp"
#include "l1rates/forward_operator.hpp"
#include "l1rates/io.hpp"
#include "l1rates/linalg.hpp"
#include "l1rates/nazarov.hpp"
#include "l1rates/rate_function.hpp"
#include "l1rates/reproduce.hpp"
#include "l1rates/sequence.hpp"
#include "l1rates/tikhonov.hpp"
