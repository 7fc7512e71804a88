/// Minimal library walkthrough: build a parameter set, run the analysis
/// chain, print the headline quantities, then cross-check the predicted
/// linear behavior against a short simulation.
#include <iostream>

#include "islm/islm.hpp"

int main() {
    islm::ModelParams p{};
    islm::set_param(p, "a", 0.38);
    islm::set_param(p, "alpha", 0.96);
    islm::set_param(p, "beta", 1.0);
    islm::set_param(p, "alpha1", 0.5);
    islm::set_param(p, "alpha2", 0.83);
    islm::set_param(p, "gamma0", 1.0);
    islm::set_param(p, "r2", 0.003);
    islm::set_param(p, "m", 0.005);
    islm::set_param(p, "d", 0.1);
    islm::set_param(p, "s", 0.3);
    islm::set_param(p, "epsilon", 0.8);
    islm::set_param(p, "delta", 0.2);
    islm::set_param(p, "g", 50.0);

    const islm::AnalysisResult ar = islm::analyze(p);
    std::cout << "Y0 = " << islm::fmt10(ar.eq.Y0) << ", r0 = " << islm::fmt10(ar.eq.r0)
              << ", K0 = " << islm::fmt10(ar.eq.K0) << ", M0 = " << islm::fmt10(ar.eq.M0)
              << "\n";
    if (!ar.has_hopf) {
        std::cout << "no stability switch\n";
        return 0;
    }
    const islm::HopfPoint& h = ar.stab.hopf_points.front();
    std::cout << "omega0 = " << islm::fmt10(h.omega0) << ", tau0 = " << islm::fmt10(h.tau0)
              << "\n";
    if (ar.nf_ok) {
        std::cout << "mu2 = " << islm::fmt10(ar.nf.main.mu2)
                  << ", beta2 = " << islm::fmt10(ar.nf.main.beta2)
                  << ", T2 = " << islm::fmt10(ar.nf.main.T2) << "\n";
        std::cout << "verdict: " << ar.nf.main.verdict.direction << " bifurcation, "
                  << ar.nf.main.verdict.orbit << " cycle\n";
    }

    // Short simulation below the determinant-consistent crossing: the Y
    // envelope should decay.
    const double tau = 0.75;
    const double dt = tau / 512.0;
    const islm::Trajectory traj =
        islm::simulate(p, tau, islm::HistorySpec::constant_offset(1.0, 0.0, 0.0, 0.0),
                       200.0, dt);
    const islm::EnvelopeResult env = islm::classify_envelope(traj, ar.eq, 0);
    std::cout << "simulation at tau = " << tau << ": " << islm::to_string(env.cls)
              << ", period " << islm::fmt10(islm::estimate_period(traj, ar.eq, 0)) << "\n";
    return 0;
}
