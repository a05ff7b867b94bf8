#include <cmath>
#include <vector>

#include "doctest.h"
#include "dualprop/bench.hpp"
#include "dualprop/oracle.hpp"
#include "dualprop/serialize.hpp"
#include "support/test_support.hpp"

using dualprop::Activation;
using dualprop::Gradient;
using dualprop::Mlp;
using dualprop::Perceptron;
using dualprop::Sample;

TEST_SUITE("oracle") {
  TEST_CASE("analytic backprop reference values") {
    const Perceptron m({1, 1}, 0, Activation::Sigmoid);
    const Gradient g = grad_backprop_analytic(m, {{1, 0}, 1});
    CHECK(g.dW()[0] == doctest::Approx(-0.10575418556853344).epsilon(1e-13));
    CHECK(g.dW()[1] == 0.0);
    CHECK(g.db() == doctest::Approx(-0.10575418556853344).epsilon(1e-13));

    const Perceptron q({0.5, -1.5}, 0.1, Activation::Sigmoid);
    const std::vector<double> x{0.2, 0.9};
    CHECK(grad_backprop_analytic(q, {x, forward(q, x)}).max_abs() == 0.0);

    const Perceptron lin({2, -1}, 0.5, Activation::Identity);
    const Gradient gl = grad_backprop_analytic(lin, {{3, 4}, 1});
    const double r = 2 * ((2 * 3 - 4 + 0.5) - 1);
    CHECK(gl.dW()[0] == r * 3);
    CHECK(gl.dW()[1] == r * 4);
    CHECK(gl.db() == r);
  }

  TEST_CASE("finite differences are exact on quadratic losses") {
    const Perceptron lin({0.75, -1.25, 2}, -0.5, Activation::Identity);
    const Sample s{{1.5, -0.5, 0.25}, 2};
    for (double h : {1e-6, 1e-3, 0.1, 1.0}) {
      const Gradient fd = grad_finite_difference(lin, s, h);
      CHECK(compare(fd, grad_backprop_analytic(lin, s), 1e-12).pass);
    }
  }

  TEST_CASE("finite differences at the sigmoid example") {
    const Perceptron m({1, 1}, 0, Activation::Sigmoid);
    const Sample s{{1, 0}, 1};
    CHECK(compare(grad_finite_difference(m, s), grad_backprop_analytic(m, s), 1e-6).pass);
  }

  TEST_CASE("zero input gives zero weight gradient") {
    const Perceptron m({0.3, -0.8}, 0.4, Activation::Tanh);
    const Sample s{{0, 0}, 0.9};
    const Gradient fd = grad_finite_difference(m, s);
    CHECK(fd.dW()[0] == 0.0);
    CHECK(fd.dW()[1] == 0.0);
    CHECK(testsupport::rel_err(fd.db(), grad_backprop_analytic(m, s).db()) <= 1e-8);
  }

  TEST_CASE("finite difference argument checks") {
    const Perceptron m({1}, 0, Activation::Sigmoid);
    CHECK_THROWS_AS(grad_finite_difference(m, {{1}, 0}, 0.0), dualprop::ConfigError);
    CHECK_THROWS_AS(grad_finite_difference(m, {{1, 2}, 0}), dualprop::ShapeError);
  }

  TEST_CASE("network backprop agrees with finite differences") {
    dualprop::SplitMix64 rng(21);
    const std::vector<std::size_t> widths{4, 3, 2, 1};
    for (int i = 0; i < 50; ++i) {
      const Mlp net = dualprop::random_mlp(widths, i % 2 ? Activation::Tanh : Activation::Sigmoid, 1.0, rng);
      const Sample s = dualprop::random_sample(4, rng);
      const auto report = compare(grad_backprop_analytic(net, s), grad_finite_difference(net, s), 1e-6);
      CHECK_MESSAGE(report.pass, report.worst_index, " ", report.max_rel_err);
    }
  }

  TEST_CASE("compare") {
    const Perceptron m({0.4, 0.7}, -0.1, Activation::Sigmoid);
    const Gradient g = grad_backprop_analytic(m, {{0.5, 1}, 1});
    const auto self = compare(g, g, 0.0);
    CHECK(self.pass);
    CHECK(self.max_abs_err == 0.0);
    CHECK(self.max_rel_err == 0.0);

    Gradient twice = g;
    twice *= 2.0;
    const auto r = compare(g, twice, 1e-6);
    CHECK_FALSE(r.pass);
    CHECK(r.max_rel_err == doctest::Approx(0.5));

    Gradient tiny = Gradient::zeros_like(m);
    Gradient tiny2 = tiny;
    tiny2.layers[0].dW[0] = 5e-9;
    const auto fallback = compare(tiny, tiny2, 1e-8);
    CHECK(fallback.max_rel_err == doctest::Approx(5e-9));
    CHECK(fallback.pass);
    CHECK(fallback.worst_index == "layer0.W[0][0]");

    const Perceptron wide({1, 2, 3}, 0, Activation::Sigmoid);
    CHECK_THROWS_AS(compare(g, Gradient::zeros_like(wide), 1.0), dualprop::ShapeError);
  }

  TEST_CASE("property: compare is symmetric") {
    dualprop::SplitMix64 rng(12);
    for (int i = 0; i < 200; ++i) {
      const Perceptron m = dualprop::guarded_perceptron(6, Activation::Sigmoid, rng);
      const Sample s = dualprop::random_sample(6, rng);
      const Gradient a = grad_backprop_analytic(m, s);
      const Gradient b = grad_finite_difference(m, s, 1e-3);
      CHECK(compare(a, b, 1e-6).max_rel_err == compare(b, a, 1e-6).max_rel_err);
    }
  }

  TEST_CASE("report JSON round trip") {
    const Perceptron m({0.4, 0.7}, -0.1, Activation::Sigmoid);
    const Sample s{{0.5, 1}, 1};
    const auto report = compare(grad_backprop_analytic(m, s), grad_finite_difference(m, s), 1e-6);
    const auto back = dualprop::grad_report_from_json(dualprop::to_json(report));
    CHECK(back.grad_a == report.grad_a);
    CHECK(back.grad_b == report.grad_b);
    CHECK(back.max_abs_err == report.max_abs_err);
    CHECK(back.max_rel_err == report.max_rel_err);
    CHECK(back.worst_index == report.worst_index);
    CHECK(back.tolerance == report.tolerance);
    CHECK(back.pass == report.pass);

    CHECK_THROWS_AS(dualprop::grad_report_from_json("{not json"), dualprop::IoError);
  }
}
