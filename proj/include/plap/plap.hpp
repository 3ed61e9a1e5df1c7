#pragma once

#include "plap/closed_forms.hpp"
#include "plap/derivatives.hpp"
#include "plap/energy.hpp"
#include "plap/errors.hpp"
#include "plap/estimates.hpp"
#include "plap/exponents.hpp"
#include "plap/family.hpp"
#include "plap/grid.hpp"
#include "plap/interpolation.hpp"
#include "plap/io.hpp"
#include "plap/ivp.hpp"
#include "plap/nonlinearity.hpp"
#include "plap/problem.hpp"
#include "plap/profile.hpp"
#include "plap/quadrature.hpp"
#include "plap/shooting.hpp"
#include "plap/stability.hpp"
#include "plap/test_function.hpp"
#include "plap/version.hpp"
