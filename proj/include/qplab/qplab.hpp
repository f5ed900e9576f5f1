#ifndef QPLAB_QPLAB_HPP
#define QPLAB_QPLAB_HPP

#include "qplab/btz.hpp"
#include "qplab/double_construction.hpp"
#include "qplab/lie_context.hpp"
#include "qplab/numerics.hpp"
#include "qplab/quasi_poisson.hpp"
#include "qplab/run_config.hpp"
#include "qplab/serialize.hpp"
#include "qplab/verify.hpp"

#endif
