#include <doctest.h>

#include <cmath>
#include <vector>

#include "ctvae/eigen.hpp"
#include "ctvae/nn.hpp"

using namespace ctvae;

TEST_CASE("glorot bounds and determinism") {
    Rng rng(42);
    Matrix a = glorot_init(1, 5, rng);
    for (double x : a.data()) CHECK(std::abs(x) <= 1.0);

    Rng rng2(7);
    Matrix b = glorot_init(50, 10, rng2);
    const double bound = std::sqrt(6.0 / 60.0);
    for (double x : b.data()) CHECK(std::abs(x) <= bound);

    Rng r1(42), r2(42);
    Matrix m1 = glorot_init(3, 3, r1);
    Matrix m2 = glorot_init(3, 3, r2);
    CHECK(m1.data() == m2.data());

    Rng r3(0);
    CHECK_THROWS_AS(glorot_init(0, 3, r3), std::invalid_argument);
}

TEST_CASE("forward identity and relu") {
    DenseLayer lin;
    lin.weights = Matrix::identity(2);
    lin.bias = {0.0, 0.0};
    lin.activation = Activation::Linear;
    Mlp net({lin});
    CHECK(net.forward({1.0, 2.0}) == std::vector<double>{1.0, 2.0});

    DenseLayer relu = lin;
    relu.activation = Activation::ReLU;
    Mlp rnet({relu});
    CHECK(rnet.forward({-1.0, 2.0}) == std::vector<double>{0.0, 2.0});

    CHECK_THROWS_AS(net.forward({1.0, 2.0, 3.0}), std::invalid_argument);
}

TEST_CASE("forward matches hand-rolled matrix product") {
    Rng rng(7);
    Mlp net({DenseLayer(3, 4, Activation::ReLU, rng), DenseLayer(4, 2, Activation::Linear, rng)});
    const std::vector<double> x{0.3, -0.5, 0.9};

    // independent oracle: explicit affine + relu, plain loops
    const auto& l0 = net.layers()[0];
    std::vector<double> h(4, 0.0);
    for (std::size_t o = 0; o < 4; ++o) {
        double acc = l0.bias[o];
        for (std::size_t i = 0; i < 3; ++i) acc += l0.weights(o, i) * x[i];
        h[o] = acc > 0 ? acc : 0.0;
    }
    const auto& l1 = net.layers()[1];
    std::vector<double> y(2, 0.0);
    for (std::size_t o = 0; o < 2; ++o) {
        double acc = l1.bias[o];
        for (std::size_t i = 0; i < 4; ++i) acc += l1.weights(o, i) * h[i];
        y[o] = acc;
    }

    std::vector<double> got = net.forward(x);
    for (std::size_t i = 0; i < 2; ++i) CHECK(got[i] == doctest::Approx(y[i]).epsilon(1e-14));
}

TEST_CASE("backward: quadratic loss through identity, zero upstream, tape reuse") {
    DenseLayer lin;
    lin.weights = Matrix::identity(3);
    lin.bias = {0.0, 0.0, 0.0};
    lin.activation = Activation::Linear;
    Mlp net({lin});
    const std::vector<double> x{1.0, -2.0, 0.5};

    GradientTape tape;
    std::vector<double> y = net.forward(x, &tape);
    auto grads = net.zero_grads();
    // loss = 0.5*||y||^2 -> upstream = y; through identity input grad = x
    std::vector<double> in_grad = net.backward(tape, y, grads);
    for (std::size_t i = 0; i < 3; ++i) CHECK(in_grad[i] == doctest::Approx(x[i]));
    CHECK_THROWS_AS(net.backward(tape, y, grads), std::logic_error);

    GradientTape tape2;
    net.forward(x, &tape2);
    auto grads2 = net.zero_grads();
    std::vector<double> zero(3, 0.0);
    net.backward(tape2, zero, grads2);
    for (double g : grads2[0].d_weights.data()) CHECK(g == 0.0);
    for (double g : grads2[0].d_bias) CHECK(g == 0.0);
}

TEST_CASE("backward matches central finite differences") {
    Rng rng(11);
    Mlp net({DenseLayer(4, 3, Activation::Tanh, rng),
             DenseLayer(3, 3, Activation::Sigmoid, rng),
             DenseLayer(3, 2, Activation::Linear, rng)});
    const std::vector<double> x{0.2, -0.1, 0.7, 0.4};
    const std::vector<double> target{0.5, -0.3};

    auto loss_of = [&](const Mlp& m) {
        std::vector<double> y = m.forward(x);
        double l = 0.0;
        for (std::size_t i = 0; i < y.size(); ++i) l += (y[i] - target[i]) * (y[i] - target[i]);
        return l;
    };

    GradientTape tape;
    std::vector<double> y = net.forward(x, &tape);
    std::vector<double> upstream(2);
    for (std::size_t i = 0; i < 2; ++i) upstream[i] = 2.0 * (y[i] - target[i]);
    auto grads = net.zero_grads();
    net.backward(tape, upstream, grads);

    const double h = 1e-5;
    for (std::size_t li = 0; li < net.layers().size(); ++li) {
        for (std::size_t wi = 0; wi < net.layers()[li].weights.size(); ++wi) {
            Mlp plus = net, minus = net;
            plus.layers()[li].weights.data()[wi] += h;
            minus.layers()[li].weights.data()[wi] -= h;
            const double fd = (loss_of(plus) - loss_of(minus)) / (2.0 * h);
            const double an = grads[li].d_weights.data()[wi];
            CHECK(std::abs(an - fd) <= 1e-4 * std::max({1.0, std::abs(an), std::abs(fd)}));
        }
        for (std::size_t bi = 0; bi < net.layers()[li].bias.size(); ++bi) {
            Mlp plus = net, minus = net;
            plus.layers()[li].bias[bi] += h;
            minus.layers()[li].bias[bi] -= h;
            const double fd = (loss_of(plus) - loss_of(minus)) / (2.0 * h);
            const double an = grads[li].d_bias[bi];
            CHECK(std::abs(an - fd) <= 1e-4 * std::max({1.0, std::abs(an), std::abs(fd)}));
        }
    }
}

TEST_CASE("adam basics") {
    SUBCASE("zero gradient leaves params unchanged") {
        Adam opt(2, 0.1);
        std::vector<double> p{1.0, -2.0};
        std::vector<double> g{0.0, 0.0};
        opt.step({p.data()}, {g.data()}, {2});
        CHECK(p[0] == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(p[1] == doctest::Approx(-2.0).epsilon(1e-12));
    }
    SUBCASE("constant positive gradient decreases the parameter") {
        Adam opt(1, 0.01);
        std::vector<double> p{0.5};
        std::vector<double> g{1.0};
        double prev = p[0];
        for (int i = 0; i < 20; ++i) {
            opt.step({p.data()}, {g.data()}, {1});
            CHECK(p[0] < prev);
            prev = p[0];
        }
    }
    SUBCASE("minimizes (p-3)^2 from 0") {
        Adam opt(1, 0.1);
        std::vector<double> p{0.0};
        for (int i = 0; i < 100; ++i) {
            std::vector<double> g{2.0 * (p[0] - 3.0)};
            opt.step({p.data()}, {g.data()}, {1});
        }
        CHECK(std::abs(p[0] - 3.0) < 0.1);
    }
}

TEST_CASE("sym_eigen: identity, diagonal, reconstruction") {
    EigenDecomposition eig = sym_eigen(Matrix::identity(3));
    for (double v : eig.values) CHECK(v == doctest::Approx(1.0).epsilon(1e-12));

    Matrix diag(2, 2);
    diag(0, 0) = 4.0;
    diag(1, 1) = 1.0;
    EigenDecomposition e2 = sym_eigen(diag);
    CHECK(e2.values[0] == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(e2.values[1] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(e2.vectors(0, 0)) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(std::abs(e2.vectors(1, 1)) == doctest::Approx(1.0).epsilon(1e-10));

    Rng rng(5);
    Matrix a(6, 6);
    for (std::size_t i = 0; i < 6; ++i)
        for (std::size_t j = i; j < 6; ++j) a(i, j) = a(j, i) = rng.uniform(-1, 1);
    EigenDecomposition e3 = sym_eigen(a);
    // V Lambda V^T reconstructs the input
    for (std::size_t i = 0; i < 6; ++i)
        for (std::size_t j = 0; j < 6; ++j) {
            double acc = 0.0;
            for (std::size_t k = 0; k < 6; ++k)
                acc += e3.vectors(i, k) * e3.values[k] * e3.vectors(j, k);
            CHECK(acc == doctest::Approx(a(i, j)).epsilon(1e-8));
        }

    Matrix asym(2, 2);
    asym(0, 1) = 1.0;
    CHECK_THROWS_AS(sym_eigen(asym), std::invalid_argument);
}

TEST_CASE("sym_eigen property: residual and orthonormality up to 128x128") {
    for (std::size_t n : {16u, 64u, 128u}) {
        Rng rng(n);
        Matrix a(n, n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i; j < n; ++j) a(i, j) = a(j, i) = rng.uniform(-1, 1);
        EigenDecomposition e = sym_eigen(a);
        double max_resid = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t k = 0; k < n; ++k) {
                double av = 0.0;
                for (std::size_t j = 0; j < n; ++j) av += a(i, j) * e.vectors(j, k);
                max_resid = std::max(max_resid, std::abs(av - e.values[k] * e.vectors(i, k)));
            }
        CHECK(max_resid < 1e-8);
        double max_ortho = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = 0; q < n; ++q) {
                double dot = 0.0;
                for (std::size_t i = 0; i < n; ++i) dot += e.vectors(i, p) * e.vectors(i, q);
                max_ortho = std::max(max_ortho, std::abs(dot - (p == q ? 1.0 : 0.0)));
            }
        CHECK(max_ortho < 1e-8);
        for (std::size_t i = 0; i + 1 < n; ++i) CHECK(e.values[i] >= e.values[i + 1]);
    }
}
