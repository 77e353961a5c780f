// Energy of the double Yukawa lattice (v1 = 9.8, kappa1 = 2) as a function of the
// aspect ratio, on both sides of its second-order transition.

#include <cmath>
#include <cstdio>

#include "rectlat/rectlat.hpp"

int main()
{
    const rectlat::PotentialSpec spec = rectlat::derive_double_yukawa(9.8, 2.0);
    const rectlat::TransitionPoint tp = rectlat::find_transition(spec);
    std::printf("A* = %.12f (E4 = %.4e, %s order)\n", tp.a_star, tp.e4_at_a_star,
                std::string(rectlat::to_string(tp.order)).c_str());

    for (double area : {tp.a_star - 0.05, tp.a_star + 0.05}) {
        std::printf("\nA = %.4f\n  Delta        E(A,Delta) - E(A,1)\n", area);
        for (double delta = 1.0; delta <= 1.6001; delta += 0.05) {
            std::printf("  %.3f  % .6e\n", delta,
                        rectlat::energy_difference(spec, area, std::log(delta)));
        }
        const rectlat::AspectMinimum m = rectlat::minimize_aspect(spec, area);
        std::printf("  minimum at Delta = %.6f, E = %.12f\n", std::exp(m.eps), m.energy);
    }
    return 0;
}
