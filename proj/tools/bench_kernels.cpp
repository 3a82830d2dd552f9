// Compares the serial reference kernels against the OpenMP versions on
// representative workloads and prints a timing table.

#include <algorithm>
#include <chrono>
#include <iostream>

#include "asdim/cover_search.hpp"
#include "asdim/covers.hpp"
#include "asdim/groups.hpp"
#include "asdim/simplicial.hpp"

using namespace asdim;

namespace {

template <class F>
double time_s(F&& f) {
    auto t0 = std::chrono::steady_clock::now();
    f();
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
        .count();
}

void row(const std::string& name, double serial, double parallel, bool same) {
    std::cout.setf(std::ios::fixed);
    std::cout.precision(3);
    std::cout << name << "  serial " << serial << "s  parallel " << parallel
              << "s  speedup " << (parallel > 0 ? serial / parallel : 0)
              << (same ? "" : "  MISMATCH") << "\n";
}

} // namespace

int main() {
    std::cout << "threads: " << max_threads() << "\n";

    {
        groups::ZmModel z2(2);
        auto ball = z2.ball(26);
        auto& s = *ball.space;
        Rat ds, dp;
        double ts = time_s([&] { ds = s.diameter(Exec::Serial); });
        double tp = time_s([&] { dp = s.diameter(Exec::Parallel); });
        row("diameter(Z^2 ball r=26, " + std::to_string(s.size()) + " pts)", ts,
            tp, ds == dp);
    }
    {
        groups::ZmModel z(1);
        auto ball = z.ball(900);
        covers::Cover c;
        c.space = ball.space;
        std::map<i64, int> pos;
        for (int i = 0; i < ball.space->size(); ++i)
            pos[std::stoll(ball.space->label(i))] = i;
        for (i64 lo = -900; lo <= 900; lo += 150) {
            covers::PointSet set;
            for (i64 v = lo; v < lo + 250 && v <= 900; ++v)
                if (pos.count(v)) set.push_back(pos[v]);
            std::sort(set.begin(), set.end());
            if (!set.empty()) c.sets.push_back(set);
        }
        ExtRat ls, lp;
        double ts = time_s([&] {
            ls = covers::lebesgue_number(*c.space, c.sets, nullptr, Exec::Serial);
        });
        double tp = time_s([&] {
            lp = covers::lebesgue_number(*c.space, c.sets, nullptr, Exec::Parallel);
        });
        row("lebesgue(Z ball r=900, " + std::to_string(c.sets.size()) + " sets)",
            ts, tp, ls == lp);

        auto nv = simp::nerve(c);
        std::vector<simp::UniformPoint> img;
        for (int x = 0; x < c.space->size(); ++x)
            img.push_back(simp::canonical_projection(c, nv, x));
        simp::PairScanReport rs, rp;
        bool oks = false, okp = false;
        double ts2 = time_s([&] {
            oks = simp::verify_lipschitz_uniform(*c.space, img, Rat(1), &rs, 3000,
                                                 1, Exec::Serial);
        });
        double tp2 = time_s([&] {
            okp = simp::verify_lipschitz_uniform(*c.space, img, Rat(1), &rp, 3000,
                                                 1, Exec::Parallel);
        });
        row("projection lipschitz scan (1801 pts exhaustive)", ts2, tp2,
            oks == okp && rs.max_ratio == rp.max_ratio);
    }
    {
        groups::ZmModel z2(2);
        auto ball = z2.ball(4);
        covers::SearchLimits limits;
        covers::ScaleDimCertificate cs, cp;
        double ts = time_s([&] {
            cs = covers::scale_dim_refute(ball.space, Rat(3), Rat(6), 1, limits,
                                          Exec::Serial);
        });
        double tp = time_s([&] {
            cp = covers::scale_dim_refute(ball.space, Rat(3), Rat(6), 1, limits,
                                          Exec::Parallel);
        });
        row("refute(Z^2 ball r=4, d=3, B=6, n=1)", ts, tp,
            cs.verdict == cp.verdict);
    }
    return 0;
}
