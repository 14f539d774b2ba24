#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <cstring>
#include <filesystem>
#include <numeric>
#include <vector>

#include "doctest.h"
#include "fd_check.hpp"
#include "omlab/core/adam.hpp"
#include "omlab/core/checkpoint.hpp"
#include "omlab/core/distributions.hpp"
#include "omlab/core/error.hpp"
#include "omlab/core/kernels.hpp"
#include "omlab/core/layers.hpp"
#include "omlab/core/ops.hpp"
#include "omlab/core/random.hpp"
#include "omlab/core/tensor.hpp"

using namespace omlab;
using namespace omlab::core;
using testutil::fd_check_all;
using testutil::fd_check_directional;
using testutil::rand_const;
using testutil::rand_param;

namespace {

Tensor weighted_sum(const Tensor& y, const Tensor& w) { return sum(mul(y, w)); }

}  // namespace

TEST_CASE("elementwise forward values") {
    auto a = Tensor::constant({2, 2}, {1.0, -2.0, 0.5, 3.0});
    auto b = Tensor::constant({2, 2}, {2.0, 2.0, -1.0, 1.0});

    auto s = add(a, b);
    CHECK(s.values() == std::vector<double>{3.0, 0.0, -0.5, 4.0});
    auto d = sub(a, b);
    CHECK(d.values() == std::vector<double>{-1.0, -4.0, 1.5, 2.0});
    auto m = mul(a, b);
    CHECK(m.values() == std::vector<double>{2.0, -4.0, -0.5, 3.0});
    auto n = neg(a);
    CHECK(n.values()[1] == 2.0);
    auto f = affine(a, 2.0, 1.0);
    CHECK(f.values() == std::vector<double>{3.0, -3.0, 2.0, 7.0});

    auto bias = Tensor::constant({2}, {10.0, 20.0});
    auto ab = add(a, bias);
    CHECK(ab.values() == std::vector<double>{11.0, 18.0, 10.5, 23.0});

    CHECK(square(a).values()[3] == 9.0);
    CHECK(omlab::core::sqrt(Tensor::constant({1}, {16.0})).value() == 4.0);
    CHECK(clamp(a, -1.0, 1.0).values() == std::vector<double>{1.0, -1.0, 0.5, 1.0});
    CHECK(exp(Tensor::scalar(0.0)).value() == 1.0);
    CHECK(log(Tensor::scalar(1.0)).value() == 0.0);
    CHECK(tanh(Tensor::scalar(0.0)).value() == 0.0);
    CHECK(sigmoid(Tensor::scalar(0.0)).value() == 0.5);
}

TEST_CASE("matmul and reductions forward") {
    // [2,3] x [3,2]
    auto a = Tensor::constant({2, 3}, {1, 2, 3, 4, 5, 6});
    auto b = Tensor::constant({3, 2}, {7, 8, 9, 10, 11, 12});
    auto c = matmul(a, b);
    CHECK(c.shape() == std::vector<int>{2, 2});
    CHECK(c.values() == std::vector<double>{58, 64, 139, 154});

    auto v = Tensor::constant({3}, {1, 0, -1});
    auto vc = matmul(v, b);
    CHECK(vc.shape() == std::vector<int>{2});
    CHECK(vc.values() == std::vector<double>{7 - 11, 8 - 12});

    CHECK(sum(a).value() == 21.0);
    CHECK(mean(a).value() == doctest::Approx(3.5));
    CHECK(rowsum(a).values() == std::vector<double>{6, 15});
    CHECK(rowsum(a).shape() == std::vector<int>{2, 1});
    CHECK(colsum(a).values() == std::vector<double>{5, 7, 9});
    CHECK(colsum(a).shape() == std::vector<int>{1, 3});
}

TEST_CASE("softmax family forward") {
    auto x = Tensor::constant({2, 3}, {1.0, 2.0, 3.0, -1.0, 0.0, 1000.0});
    auto p = softmax_rows(x);
    for (int i = 0; i < 2; ++i) {
        double s = 0.0;
        for (int j = 0; j < 3; ++j) {
            double v = p.values()[i * 3 + j];
            CHECK(v >= 0.0);
            s += v;
        }
        CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
    }
    // huge logit: stabilized, no overflow, winner takes (almost) all
    CHECK(p.values()[5] == doctest::Approx(1.0).epsilon(1e-12));

    auto lp = log_softmax_rows(x);
    for (int j = 0; j < 3; ++j)
        CHECK(lp.values()[j] == doctest::Approx(std::log(p.values()[j])).epsilon(1e-12));
    // softmax(x) == exp(log_softmax(x)) on the spicy row too
    CHECK(std::exp(lp.values()[5]) == doctest::Approx(p.values()[5]).epsilon(1e-12));
}

TEST_CASE("layout ops forward") {
    auto a = Tensor::constant({2, 3}, {1, 2, 3, 4, 5, 6});
    auto g = gather_cols(a, {2, 0});
    CHECK(g.shape() == std::vector<int>{2, 1});
    CHECK(g.values() == std::vector<double>{3, 4});

    auto b = Tensor::constant({2, 2}, {7, 8, 9, 10});
    auto cc = concat_cols({a, b});
    CHECK(cc.shape() == std::vector<int>{2, 5});
    CHECK(cc.values() == std::vector<double>{1, 2, 3, 7, 8, 4, 5, 6, 9, 10});

    auto sl = slice_cols(cc, 3, 2);
    CHECK(sl.values() == std::vector<double>{7, 8, 9, 10});

    auto r1 = Tensor::constant({3}, {1, 2, 3});
    auto r2 = Tensor::constant({2, 3}, {4, 5, 6, 7, 8, 9});
    auto st = stack_rows({r1, r2});
    CHECK(st.shape() == std::vector<int>{3, 3});
    CHECK(st.values() == std::vector<double>{1, 2, 3, 4, 5, 6, 7, 8, 9});

    CHECK_FALSE(detach(a).requires_grad());
}

TEST_CASE("finite differences across the op set") {
    Rng rng(2024);
    auto check = [&](const char* name, const std::vector<Tensor>& params,
                     const testutil::LossFn& loss) {
        CAPTURE(name);
        auto rep = fd_check_all(params, loss);
        CHECK(rep.max_rel_err < 1e-4);
    };

    for (int it = 0; it < 3; ++it) {
        {
            auto a = rand_param({3, 4}, rng), b = rand_param({3, 4}, rng);
            auto w = rand_const({3, 4}, rng);
            check("add", {a, b}, [=](const auto&) { return weighted_sum(add(a, b), w); });
            check("sub", {a, b}, [=](const auto&) { return weighted_sum(sub(a, b), w); });
            check("mul", {a, b}, [=](const auto&) { return weighted_sum(mul(a, b), w); });
            check("affine", {a},
                  [=](const auto&) { return weighted_sum(affine(a, -1.7, 0.3), w); });
        }
        {
            auto a = rand_param({3, 4}, rng);
            auto bias = rand_param({4}, rng);
            auto w = rand_const({3, 4}, rng);
            check("add_bias", {a, bias},
                  [=](const auto&) { return weighted_sum(add(a, bias), w); });
        }
        {
            auto a = rand_param({2, 3}, rng), b = rand_param({3, 4}, rng);
            auto w = rand_const({2, 4}, rng);
            check("matmul", {a, b}, [=](const auto&) { return weighted_sum(matmul(a, b), w); });
        }
        {
            auto a = rand_param({3}, rng), b = rand_param({3, 2}, rng);
            auto w = rand_const({2}, rng);
            check("matmul_vec", {a, b},
                  [=](const auto&) { return weighted_sum(matmul(a, b), w); });
        }
        {
            auto x = rand_param({2, 5}, rng);
            auto w = rand_const({2, 5}, rng);
            check("tanh", {x}, [=](const auto&) { return weighted_sum(tanh(x), w); });
            check("sigmoid", {x}, [=](const auto&) { return weighted_sum(sigmoid(x), w); });
            check("exp", {x}, [=](const auto&) { return weighted_sum(exp(x), w); });
            check("square", {x}, [=](const auto&) { return weighted_sum(square(x), w); });
        }
        {
            auto x = rand_param({2, 5}, rng, 0.5, 2.0);
            auto w = rand_const({2, 5}, rng);
            check("log", {x}, [=](const auto&) { return weighted_sum(log(x), w); });
            check("sqrt", {x}, [=](const auto&) { return weighted_sum(omlab::core::sqrt(x), w); });
        }
        {
            // keep inputs away from the clamp knees so FD stays two-sided
            std::vector<double> v(12);
            for (auto& e : v) {
                e = rng.uniform(-1.0, 1.0);
                if (std::abs(e - 0.5) < 1e-3) e += 5e-3;
                if (std::abs(e + 0.5) < 1e-3) e -= 5e-3;
            }
            auto x = Tensor::param({3, 4}, v);
            auto w = rand_const({3, 4}, rng);
            check("clamp", {x},
                  [=](const auto&) { return weighted_sum(clamp(x, -0.5, 0.5), w); });
        }
        {
            auto x = rand_param({3, 4}, rng);
            check("sum", {x}, [=](const auto&) { return sum(x); });
            check("mean", {x}, [=](const auto&) { return mean(x); });
            auto wr = rand_const({3, 1}, rng);
            check("rowsum", {x}, [=](const auto&) { return weighted_sum(rowsum(x), wr); });
            auto wc = rand_const({1, 4}, rng);
            check("colsum", {x}, [=](const auto&) { return weighted_sum(colsum(x), wc); });
        }
        {
            auto x = rand_param({3, 5}, rng, -2.0, 2.0);
            auto w = rand_const({3, 5}, rng);
            check("softmax_rows", {x},
                  [=](const auto&) { return weighted_sum(softmax_rows(x), w); });
            check("log_softmax_rows", {x},
                  [=](const auto&) { return weighted_sum(log_softmax_rows(x), w); });
        }
        {
            auto x = rand_param({4, 3}, rng);
            std::vector<int> idx = {rng.uniform_int(3), rng.uniform_int(3), rng.uniform_int(3),
                                    rng.uniform_int(3)};
            auto w = rand_const({4, 1}, rng);
            check("gather_cols", {x},
                  [=](const auto&) { return weighted_sum(gather_cols(x, idx), w); });
        }
        {
            auto a = rand_param({2, 2}, rng);
            auto b = rand_const({2, 3}, rng);  // mixed requires_grad
            auto c = rand_param({2, 1}, rng);
            auto w = rand_const({2, 6}, rng);
            check("concat_cols", {a, c}, [=](const auto&) {
                return weighted_sum(concat_cols({a, b, c}), w);
            });
            auto ws = rand_const({2, 2}, rng);
            check("slice_cols", {a, c}, [=](const auto&) {
                return weighted_sum(slice_cols(concat_cols({a, b, c}), 4, 2), ws);
            });
        }
        {
            auto a = rand_param({2, 3}, rng);
            auto b = rand_param({3}, rng);
            auto w = rand_const({3, 3}, rng);
            check("stack_rows", {a, b},
                  [=](const auto&) { return weighted_sum(stack_rows({b, a}), w); });
        }
        {
            Rng init = rng.fork();
            Dense dense(4, 3, init);
            auto x = rand_param({2, 4}, rng);
            auto w = rand_const({2, 3}, rng);
            check("dense", {x, dense.w, dense.b},
                  [=](const auto&) { return weighted_sum(dense(x), w); });
        }
        {
            Rng init = rng.fork();
            Mlp mlp(3, {6}, 2, init);
            auto x = rand_param({4, 3}, rng);
            auto w = rand_const({4, 2}, rng);
            std::vector<Tensor> ps = {x};
            NamedParams named;
            mlp.params(named, "mlp");
            for (auto& [nm, t] : named) ps.push_back(t);
            check("mlp", ps, [=](const auto&) { return weighted_sum(mlp(x), w); });
        }
        {
            Rng init = rng.fork();
            GruCell gru(3, 4, init);
            auto x = rand_param({2, 3}, rng);
            auto h = rand_param({2, 4}, rng);
            auto w = rand_const({2, 4}, rng);
            check("gru_step", {x, h, gru.w_x, gru.u_zr, gru.u_c, gru.b},
                  [=](const auto&) { return weighted_sum(gru.step(x, h), w); });
        }
        {
            auto mu = rand_param({2, 3}, rng);
            auto ls = rand_param({2, 3}, rng, -1.0, 0.5);
            auto noise = rand_const({2, 3}, rng);
            auto w = rand_const({2, 3}, rng);
            check("reparam+kl", {mu, ls}, [=](const auto&) {
                DiagGaussian q{mu, ls};
                return add(weighted_sum(reparam_sample(q, noise), w),
                           kl_to_standard_normal(q));
            });
        }
        {
            // triplet-style distance: sqrt of rowsum of squares
            auto z = rand_param({3, 4}, rng);
            auto zp = rand_param({3, 4}, rng);
            auto w = rand_const({3, 1}, rng);
            check("row_norms", {z, zp}, [=](const auto&) {
                return weighted_sum(omlab::core::sqrt(rowsum(square(sub(z, zp)))), w);
            });
        }
    }
}

TEST_CASE("finite differences through a 25-step recurrent unroll") {
    Rng rng(77);
    Rng init = rng.fork();
    GruCell gru(3, 4, init);
    const int T = 25, B = 2;
    std::vector<Tensor> xs;
    for (int t = 0; t < T; ++t) xs.push_back(rand_const({B, 3}, rng));
    auto h0 = rand_param({B, 4}, rng, -0.5, 0.5);

    auto loss = [&](const std::vector<Tensor>&) {
        Tensor h = h0;
        for (int t = 0; t < T; ++t) h = gru.step(xs[t], h);
        return sum(square(h));
    };
    auto rep = fd_check_all({h0, gru.w_x, gru.u_zr, gru.u_c, gru.b}, loss);
    CHECK(rep.checked == 2 * 4 + 3 * 12 + 4 * 8 + 4 * 4 + 12);
    CHECK(rep.max_rel_err < 1e-3);

    // directional probe as used by the fast batteries
    double dir_err = fd_check_directional({h0, gru.w_x, gru.u_zr, gru.u_c, gru.b}, loss, rng);
    CHECK(dir_err < 1e-3);
}

TEST_CASE("backward semantics") {
    SUBCASE("leaf gradients accumulate across backward calls") {
        auto x = Tensor::param({2}, {3.0, -1.0});
        auto y = square(x);
        auto L = sum(y);
        L.backward();
        CHECK(x.grad() == std::vector<double>{6.0, -2.0});
        L.backward();
        CHECK(x.grad() == std::vector<double>{12.0, -4.0});
        // interior grad was rewritten, not accumulated
        CHECK(y.node()->grad == std::vector<double>{1.0, 1.0});
    }
    SUBCASE("two losses sharing a leaf add their gradients") {
        auto x = Tensor::param({2}, {3.0, -1.0});
        sum(x).backward();
        sum(square(x)).backward();
        CHECK(x.grad() == std::vector<double>{1.0 + 6.0, 1.0 - 2.0});
    }
    SUBCASE("repeated parent contributes once per occurrence") {
        auto x = Tensor::param({2}, {1.0, 2.0});
        sum(add(x, x)).backward();
        CHECK(x.grad() == std::vector<double>{2.0, 2.0});
    }
    SUBCASE("detach blocks gradient flow") {
        auto x = Tensor::param({2}, {2.0, 3.0});
        auto L = sum(mul(detach(square(x)), x));  // d/dx = x^2 only
        L.backward();
        CHECK(x.grad() == std::vector<double>{4.0, 9.0});
    }
    SUBCASE("zero_grad resets accumulation") {
        auto x = Tensor::param({1}, {5.0});
        sum(x).backward();
        x.zero_grad();
        sum(x).backward();
        CHECK(x.grad() == std::vector<double>{1.0});
    }
    SUBCASE("backward demands a scalar") {
        auto x = Tensor::param({2}, {1.0, 2.0});
        CHECK_THROWS_AS(square(x).backward(), ContractViolation);
    }
    SUBCASE("backward on a constant graph is a quiet no-op") {
        auto c = sum(square(Tensor::constant({2}, {1.0, 2.0})));
        CHECK_FALSE(c.requires_grad());
        CHECK_NOTHROW(c.backward());
    }
    SUBCASE("grad before backward throws") {
        auto x = Tensor::param({2}, {1.0, 2.0});
        CHECK_THROWS_AS((void)x.grad(), ContractViolation);
    }
    SUBCASE("requires_grad propagates through ops") {
        auto p = Tensor::param({2}, {1.0, 2.0});
        auto c = Tensor::constant({2}, {3.0, 4.0});
        CHECK(add(p, c).requires_grad());
        CHECK_FALSE(add(c, c).requires_grad());
    }
}

TEST_CASE("gaussian utilities") {
    SUBCASE("kl frozen values") {
        DiagGaussian std_q{Tensor::param({1, 2}, {0.0, 0.0}), Tensor::param({1, 2}, {0.0, 0.0})};
        CHECK(kl_to_standard_normal(std_q).value() == doctest::Approx(0.0));

        DiagGaussian q1{Tensor::param({1, 1}, {1.0}), Tensor::param({1, 1}, {0.0})};
        CHECK(kl_to_standard_normal(q1).value() == doctest::Approx(0.5).epsilon(1e-12));

        DiagGaussian q2{Tensor::param({1, 1}, {0.0}),
                        Tensor::param({1, 1}, {std::log(2.0)})};
        CHECK(kl_to_standard_normal(q2).value() ==
              doctest::Approx(1.5 - std::log(2.0)).epsilon(1e-12));
    }
    SUBCASE("kl_rows matches the scalar total") {
        Rng rng(9);
        DiagGaussian q{rand_param({3, 4}, rng), rand_param({3, 4}, rng, -1.0, 0.5)};
        auto rows = kl_rows(q);
        CHECK(rows.shape() == std::vector<int>{3, 1});
        double total = 0.0;
        for (double v : rows.values()) {
            CHECK(v >= 0.0);  // KL is nonnegative
            total += v;
        }
        CHECK(kl_to_standard_normal(q).value() == doctest::Approx(total).epsilon(1e-12));
    }
    SUBCASE("reparam frozen values") {
        DiagGaussian q{Tensor::param({1, 2}, {1.0, -1.0}), Tensor::param({1, 2}, {0.0, 0.0})};
        auto z = reparam_sample(q, Tensor::constant({1, 2}, {0.0, 0.0}));
        CHECK(z.values() == std::vector<double>{1.0, -1.0});

        DiagGaussian q2{Tensor::param({1, 1}, {1.0}), Tensor::param({1, 1}, {std::log(2.0)})};
        auto z2 = reparam_sample(q2, Tensor::constant({1, 1}, {2.0}));
        CHECK(z2.value() == doctest::Approx(5.0).epsilon(1e-12));
    }
    SUBCASE("reparam with rng draws the right shape and differentiates") {
        Rng rng(11);
        DiagGaussian q{rand_param({4, 3}, rng), rand_param({4, 3}, rng, -1.0, 0.0)};
        auto z = reparam_sample(q, rng);
        CHECK(z.shape() == std::vector<int>{4, 3});
        CHECK(z.requires_grad());
    }
}

namespace {

// independent scalar Adam for cross-checking
struct RefAdam {
    double m = 0.0, v = 0.0;
    void step(double& p, double g, const AdamConfig& c, int t) {
        m = c.beta1 * m + (1 - c.beta1) * g;
        v = c.beta2 * v + (1 - c.beta2) * g * g;
        double mh = m / (1 - std::pow(c.beta1, t));
        double vh = v / (1 - std::pow(c.beta2, t));
        p -= c.lr * mh / (std::sqrt(vh) + c.eps);
    }
};

}  // namespace

TEST_CASE("adam") {
    SUBCASE("first step moves by ~lr in the gradient's direction") {
        auto p = Tensor::param({1}, {1.0});
        AdamConfig cfg;
        cfg.lr = 1e-3;
        Adam opt({{"p", p}}, cfg);
        sum(mul(p, Tensor::constant({1}, {2.0}))).backward();  // grad = 2
        opt.step();
        const double expect = 1.0 - 1e-3 * (2.0 / (2.0 + 1e-8));
        CHECK(p.value() == doctest::Approx(expect).epsilon(1e-12));
        CHECK(p.value() > 1.0 - 1e-3 - 1e-9);
    }
    SUBCASE("trajectory matches a scalar reference for 20 steps") {
        Rng rng(13);
        auto p = Tensor::param({3}, {0.4, -0.2, 1.1});
        AdamConfig cfg;
        cfg.lr = 0.01;
        Adam opt({{"p", p}}, cfg);
        std::vector<double> ref = p.values();
        RefAdam r0, r1, r2;
        RefAdam* refs[3] = {&r0, &r1, &r2};
        for (int t = 1; t <= 20; ++t) {
            std::vector<double> g = {rng.normal(), rng.normal(), rng.normal()};
            opt.zero_grad();
            p.node()->ensure_grad();
            p.node()->grad = g;
            opt.step();
            for (int i = 0; i < 3; ++i) refs[i]->step(ref[i], g[i], cfg, t);
            for (int i = 0; i < 3; ++i)
                CHECK(p.values()[i] == doctest::Approx(ref[i]).epsilon(1e-12));
        }
        CHECK(opt.steps() == 20);
    }
    SUBCASE("params without grads are left alone") {
        auto a = Tensor::param({1}, {1.0});
        auto b = Tensor::param({1}, {2.0});
        Adam opt({{"a", a}, {"b", b}});
        sum(a).backward();
        opt.step();
        CHECK(a.value() != 1.0);
        CHECK(b.value() == 2.0);
    }
    SUBCASE("restore rejects mismatched shapes") {
        auto a = Tensor::param({2}, {1.0, 2.0});
        Adam opt({{"a", a}});
        CHECK_THROWS_AS(opt.restore({Adam::Slot{{0.0}, {0.0}}}, 1), ContractViolation);
    }
}

TEST_CASE("clip_global_norm") {
    auto a = Tensor::param({1}, {0.0});
    auto b = Tensor::param({1}, {0.0});
    a.node()->grad = {3.0};
    b.node()->grad = {4.0};
    NamedParams ps = {{"a", a}, {"b", b}};
    SUBCASE("scales down to the cap") {
        double norm = clip_global_norm(ps, 1.0);
        CHECK(norm == doctest::Approx(5.0).epsilon(1e-12));
        CHECK(a.grad()[0] == doctest::Approx(0.6).epsilon(1e-12));
        CHECK(b.grad()[0] == doctest::Approx(0.8).epsilon(1e-12));
    }
    SUBCASE("leaves small gradients untouched") {
        double norm = clip_global_norm(ps, 10.0);
        CHECK(norm == doctest::Approx(5.0).epsilon(1e-12));
        CHECK(a.grad()[0] == 3.0);
        CHECK(b.grad()[0] == 4.0);
    }
}

namespace {

// scalar re-derivation of one GRU step for a single batch row
std::vector<double> gru_scalar_ref(const GruCell& g, const std::vector<double>& x,
                                   const std::vector<double>& h) {
    const int H = g.hidden, D = g.in;
    const auto& wx = g.w_x.values();
    const auto& uzr = g.u_zr.values();
    const auto& uc = g.u_c.values();
    const auto& b = g.b.values();
    auto sig = [](double v) { return 1.0 / (1.0 + std::exp(-v)); };
    std::vector<double> z(H), r(H), c(H), out(H);
    for (int j = 0; j < H; ++j) {
        double az = b[j], ar = b[H + j];
        for (int d = 0; d < D; ++d) {
            az += x[d] * wx[d * 3 * H + j];
            ar += x[d] * wx[d * 3 * H + H + j];
        }
        for (int k = 0; k < H; ++k) {
            az += h[k] * uzr[k * 2 * H + j];
            ar += h[k] * uzr[k * 2 * H + H + j];
        }
        z[j] = sig(az);
        r[j] = sig(ar);
    }
    for (int j = 0; j < H; ++j) {
        double ac = b[2 * H + j];
        for (int d = 0; d < D; ++d) ac += x[d] * wx[d * 3 * H + 2 * H + j];
        for (int k = 0; k < H; ++k) ac += (r[k] * h[k]) * uc[k * H + j];
        c[j] = std::tanh(ac);
        out[j] = (1.0 - z[j]) * h[j] + z[j] * c[j];
    }
    return out;
}

}  // namespace

TEST_CASE("layers") {
    SUBCASE("dense matches manual affine map") {
        Rng rng(21);
        Dense d(3, 2, rng);
        auto x = rand_const({2, 3}, rng);
        auto y = d(x);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) {
                double want = d.b.values()[j];
                for (int k = 0; k < 3; ++k)
                    want += x.values()[i * 3 + k] * d.w.values()[k * 2 + j];
                CHECK(y.values()[i * 2 + j] == doctest::Approx(want).epsilon(1e-12));
            }
    }
    SUBCASE("mlp matches manual two-layer composition") {
        Rng rng(22);
        Mlp mlp(2, {3}, 1, rng);
        auto x = rand_const({1, 2}, rng);
        auto y = mlp(x);
        std::vector<double> hidden(3);
        for (int j = 0; j < 3; ++j) {
            double a = mlp.layers[0].b.values()[j];
            for (int k = 0; k < 2; ++k)
                a += x.values()[k] * mlp.layers[0].w.values()[k * 3 + j];
            hidden[j] = std::tanh(a);
        }
        double want = mlp.layers[1].b.values()[0];
        for (int j = 0; j < 3; ++j) want += hidden[j] * mlp.layers[1].w.values()[j];
        CHECK(y.value() == doctest::Approx(want).epsilon(1e-12));
    }
    SUBCASE("gru step matches scalar re-derivation per batch row") {
        Rng rng(23);
        GruCell gru(4, 5, rng);
        auto x = rand_const({3, 4}, rng);
        auto h = rand_const({3, 5}, rng);
        auto out = gru.step(x, h);
        for (int row = 0; row < 3; ++row) {
            std::vector<double> xr(x.values().begin() + row * 4, x.values().begin() + row * 4 + 4);
            std::vector<double> hr(h.values().begin() + row * 5, h.values().begin() + row * 5 + 5);
            auto want = gru_scalar_ref(gru, xr, hr);
            for (int j = 0; j < 5; ++j)
                CHECK(out.values()[row * 5 + j] == doctest::Approx(want[j]).epsilon(1e-12));
        }
    }
    SUBCASE("initial_state is zero and initialization is seed-deterministic") {
        Rng r1(42), r2(42), r3(43);
        GruCell g1(3, 4, r1), g2(3, 4, r2), g3(3, 4, r3);
        CHECK(g1.w_x.values() == g2.w_x.values());
        CHECK(g1.u_zr.values() == g2.u_zr.values());
        CHECK(g1.w_x.values() != g3.w_x.values());
        auto h0 = g1.initial_state(3);
        CHECK(h0.shape() == std::vector<int>{3, 4});
        for (double v : h0.values()) CHECK(v == 0.0);
    }
    SUBCASE("param listing is stable and fully named") {
        Rng rng(5);
        Mlp mlp(4, {8, 8}, 2, rng);
        NamedParams ps;
        mlp.params(ps, "net");
        REQUIRE(ps.size() == 6);
        CHECK(ps[0].first == "net.l0.w");
        CHECK(ps[5].first == "net.l2.b");
        GruCell gru(4, 8, rng);
        NamedParams gs;
        gru.params(gs, "enc");
        REQUIRE(gs.size() == 4);
        CHECK(gs[0].first == "enc.w_x");
    }
}

TEST_CASE("checkpoint") {
    namespace fs = std::filesystem;
    Rng rng(31);
    Mlp mlp(3, {4}, 2, rng);
    NamedParams ps;
    mlp.params(ps, "net");

    SUBCASE("params roundtrip bitwise through a file") {
        auto path = (fs::temp_directory_path() / "omlab_core_ckpt.json").string();
        ckpt::write_file(path, ckpt::make_bundle(ps));

        Rng rng2(99);
        Mlp other(3, {4}, 2, rng2);
        NamedParams qs;
        other.params(qs, "net");
        CHECK(qs[0].second.values() != ps[0].second.values());
        ckpt::load_bundle(ckpt::read_file(path), qs);
        for (size_t i = 0; i < ps.size(); ++i)
            CHECK(qs[i].second.values() == ps[i].second.values());
        fs::remove(path);
    }
    SUBCASE("format and shape violations throw") {
        auto bundle = ckpt::make_bundle(ps);
        bundle["format"] = "junk";
        CHECK_THROWS_AS(ckpt::load_bundle(bundle, ps), ContractViolation);

        Rng rng2(1);
        Mlp small(3, {5}, 2, rng2);  // different hidden width
        NamedParams qs;
        small.params(qs, "net");
        CHECK_THROWS_AS(ckpt::load_bundle(ckpt::make_bundle(ps), qs), ContractViolation);

        NamedParams extra = ps;
        extra.emplace_back("net.ghost", Tensor::param({1}, {0.0}));
        CHECK_THROWS_AS(ckpt::load_bundle(ckpt::make_bundle(ps), extra), ContractViolation);
    }
    SUBCASE("adam state roundtrip continues identically") {
        AdamConfig cfg;
        cfg.lr = 0.05;
        auto run_steps = [&](Adam& opt, NamedParams& params, int steps, int seed) {
            Rng g(seed);
            for (int s = 0; s < steps; ++s) {
                opt.zero_grad();
                for (auto& [nm, p] : params) {
                    p.node()->ensure_grad();
                    for (auto& gv : p.node()->grad) gv = g.normal();
                }
                opt.step();
            }
        };
        Adam opt(ps, cfg);
        run_steps(opt, ps, 3, 555);
        auto bundle = ckpt::make_bundle(ps);
        bundle["adam"] = ckpt::adam_to_json(opt);

        Rng rng2(2);
        Mlp fresh(3, {4}, 2, rng2);
        NamedParams qs;
        fresh.params(qs, "net");
        Adam opt2(qs, cfg);
        ckpt::load_bundle(bundle, qs);
        ckpt::adam_from_json(bundle["adam"], opt2);
        CHECK(opt2.steps() == 3);

        run_steps(opt, ps, 2, 777);
        run_steps(opt2, qs, 2, 777);
        for (size_t i = 0; i < ps.size(); ++i)
            CHECK(qs[i].second.values() == ps[i].second.values());
    }
}

TEST_CASE("rng") {
    SUBCASE("same seed, same stream; serialization resumes the stream") {
        Rng a(5), b(5);
        for (int i = 0; i < 3; ++i) CHECK(a.raw() == b.raw());
        auto s = a.serialize();
        auto next = a.raw();
        Rng c(0);
        c.deserialize(s);
        CHECK(c.raw() == next);
    }
    SUBCASE("bounded draws stay in range") {
        Rng r(6);
        for (int i = 0; i < 200; ++i) {
            int k = r.uniform_int(7);
            CHECK(k >= 0);
            CHECK(k < 7);
            double u = r.uniform(-2.0, 3.0);
            CHECK(u >= -2.0);
            CHECK(u <= 3.0);
            CHECK(std::isfinite(r.gumbel()));
        }
        CHECK_THROWS_AS(r.uniform_int(0), ContractViolation);
    }
    SUBCASE("categorical respects point masses and shuffle permutes") {
        Rng r(8);
        for (int i = 0; i < 20; ++i) CHECK(r.categorical({0.0, 0.0, 1.0}) == 2);
        std::vector<int> v(10);
        std::iota(v.begin(), v.end(), 0);
        r.shuffle(v);
        auto sorted = v;
        std::sort(sorted.begin(), sorted.end());
        for (int i = 0; i < 10; ++i) CHECK(sorted[i] == i);
    }
}

TEST_CASE("engine results are identical across kernel thread counts") {
    auto run_once = [&]() {
        Rng rng(808);
        GruCell gru(16, 64, rng);
        auto x = rand_const({32, 16}, rng);
        Tensor h = gru.initial_state(32);
        for (int t = 0; t < 3; ++t) h = gru.step(x, h);
        auto L = sum(square(h));
        L.backward();
        return std::make_pair(h.values(), gru.w_x.grad());
    };
    kernels::set_threads(1);
    auto serial = run_once();
    kernels::set_threads(4);
    auto parallel = run_once();
    kernels::set_threads(0);
    CHECK(serial.first == parallel.first);
    CHECK(serial.second == parallel.second);
}
