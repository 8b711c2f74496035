// Builds U on Gamma1(N 2^r)^ab and prints its ordinary rank for a few r,
// then runs the control check from level r down to level 2.
#include "control2/control2.hpp"

#include <cstdlib>
#include <iostream>

int main(int argc, char** argv) {
    using namespace control2;
    const std::int64_t N = argc > 1 ? std::atoll(argv[1]) : 3;
    const int r_max = argc > 2 ? std::atoi(argv[2]) : 4;

    Session ses;
    for (int r = 2; r <= r_max; ++r) {
        const AbMap& U = ses.hecke(N, r);
        const OrdinaryModule& ord = ses.ordinary({N, r, r}, default_precision);
        std::cout << "Gamma1(" << N << "*2^" << r << "): rank " << U.rows() << ", ordinary rank " << ord.ord_rank()
                  << "\n";
    }
    const CheckResult c = verify_control(ses, {N, r_max, 2}, default_precision);
    std::cout << to_json(c).dump(2) << "\n";
    return c.status == Status::pass ? 0 : 1;
}
