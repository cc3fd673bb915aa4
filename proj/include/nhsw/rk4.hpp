// rk4.hpp - classic fourth-order Runge-Kutta step for any vector-space state

#pragma once

namespace nhsw {

// State needs operator+(State, State) and operator*(double, State).
template <class State, class Rhs>
State rk4_step(const Rhs& rhs, const State& y, double h) {
    const State k1 = rhs(y);
    const State k2 = rhs(y + (0.5 * h) * k1);
    const State k3 = rhs(y + (0.5 * h) * k2);
    const State k4 = rhs(y + h * k3);
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

}  // namespace nhsw
