// Claims about the glued full-line solution, checked as stated.

#include <lrwell/reporter.hpp>

#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <sys/wait.h>

using namespace lrwell;

namespace {

const TimeProfile& unit_profile() {
    static const TimeProfile p(ConstantMass{1.0}, ConstantCoupling{1.0}, 1.0);
    return p;
}

}  // namespace

TEST(GluedSolution, BranchesAgreeAtOrigin) {
    for (const auto& np : default_profiles()) {
        const ExactSolution sol(*np.profile);
        for (int n = 0; n <= 3; ++n)
            for (double t : {0.1, 0.5, 0.9}) {
                const cplx right = sol.branch_value(n, Region::positive, 0.0, t);
                const cplx left = sol.branch_value(n, Region::negative, 0.0, t);
                EXPECT_LE(std::abs(right - left), 1e-8) << np.name << " n " << n << " t " << t;
            }
    }
}

TEST(GluedSolution, TdseResidualForUnitProfile) {
    const Grid1D grid = Grid1D::make(-20.0, 20.0, 0.01);
    EXPECT_LE(tdse_residual(0, 0.3, grid, unit_profile()), 1e-4);
}

TEST(GluedSolution, CrankNicolsonOverTheWholeWindow) {
    const Grid1D grid = Grid1D::make(-20.0, 20.0, 0.01);
    const auto x = grid.nodes();
    for (const auto& np : default_profiles()) {
        const ExactSolution sol(*np.profile);
        for (int n = 0; n <= 2; ++n) {
            WavefunctionSample state = sol.assemble_wavefunction(n, 0.0, x);
            double now = 0.0;
            for (double t : {0.25, 0.5, 0.75, 1.0}) {
                state = crank_nicolson_propagate(*np.profile, state, now, t, 1e-4, {PotentialKind::imaginary, false})
                            .final_state;
                now = t;
                EXPECT_LE(max_deviation(state.values, sol.assemble_wavefunction(n, t, x).values), 1e-3)
                    << np.name << " n " << n << " t " << t;
            }
        }
    }
}

TEST(GluedSolution, DefaultVerifyPasses) {
    const auto out = std::filesystem::temp_directory_path() / "lrwell_strict_default";
    const std::string cmd = std::string(LRWELL_CLI) + " verify --out " + out.string() + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    std::filesystem::remove_all(out);
    ASSERT_TRUE(WIFEXITED(status));
    EXPECT_EQ(WEXITSTATUS(status), 0);
}
