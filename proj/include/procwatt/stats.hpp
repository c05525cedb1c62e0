#pragma once

namespace procwatt::stats {

/// I_x(a, b), the regularized incomplete beta function, for a, b > 0 and
/// x in [0, 1]. Evaluated by a modified Lentz continued fraction, switching
/// to the 1 - I_{1-x}(b, a) form where that converges faster.
double regularized_incomplete_beta(double a, double b, double x);

/// P(|T| >= |t|) for a Student-t variable with df > 0 degrees of freedom.
/// Equals I_{df/(df+t²)}(df/2, 1/2).
double student_t_two_sided_p(double t, double df);

}  // namespace procwatt::stats
