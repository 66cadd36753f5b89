#pragma once

#include "wtb/common.hpp"

namespace wtb::probkit {

// Gaussian upper-tail probability Q(x) = P[N(0,1) >= x]
double q_func(double x);

// log Q(x); stable far into the tail where Q underflows
double log_q_func(double x);

// inverse of q_func on (0,1)
double q_inv(double p);

// regularized lower incomplete gamma P(a,x) and its complement Q(a,x)
double gamma_p(double a, double x);
double gamma_q(double a, double x);
double log_gamma_p(double a, double x);
double log_gamma_q(double a, double x);

// regularized incomplete beta I_x(a,b)
double reg_inc_beta(double x, double a, double b);
double log_reg_inc_beta(double x, double a, double b);

}  // namespace wtb::probkit
