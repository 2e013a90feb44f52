#include "hclab/classifier.hpp"
#include "hclab/errors.hpp"
#include "hclab/rng.hpp"

#include <doctest.h>

#include <cmath>

using namespace hclab;

namespace {

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error thrown");
  return ErrorKind::Inconclusive;
}

ToleranceConfig depth5() {
  ToleranceConfig cfg;
  cfg.depth = 5;
  return cfg;
}

// Distance between coefficient directions on (I, T_n, T_m, T_{n+m}) with the
// degenerate column merged.
double direction_gap(const RelationCertificate& c, std::vector<double> expected) {
  RVector e = Eigen::Map<RVector>(expected.data(), static_cast<Index>(expected.size()));
  e.normalize();
  RVector got(3);
  got << c.coefficients(0), c.coefficients(1) + c.coefficients(2), c.coefficients(3);
  return std::min((got - e).norm(), (got + e).norm());
}

}  // namespace

TEST_CASE("relation detection on isometries") {
  ToleranceConfig cfg;
  const OperatorModel iso = weighted_shift(std::vector<cplx>(31, 1.0), 32);
  const RelationCertificate c = relation_detect(iso, cfg);
  CHECK(c.n == 1);
  CHECK(c.m == 1);
  CHECK(c.degenerate);
  CHECK(c.operator_residual <= 1e-14);
  CHECK(direction_gap(c, {1, -2, 1}) <= 1e-12);
  CHECK(c.coefficients(0) > 0);

  SeededRng rng(5);
  const RelationCertificate u = relation_detect(matrix_model(haar_unitary(6, rng)), cfg);
  CHECK(u.operator_residual <= 1e-14);
  CHECK(direction_gap(u, {1, -2, 1}) <= 1e-12);
}

TEST_CASE("relation detection on the aq operator") {
  ToleranceConfig cfg;
  const OperatorModel aq = aq_operator(0.5, 5.0, 48);
  const RelationCertificate c = relation_detect(aq, cfg);
  CHECK(c.n == 1);
  CHECK(c.m == 1);
  CHECK(direction_gap(c, {1, -3, 2}) <= 1e-6);
  CHECK(c.operator_residual <= cfg.relation_tol);
  CHECK(std::abs(c.coefficients.norm() - 1.0) < 1e-14);
}

TEST_CASE("no relation for a generic shift plus rank one") {
  ToleranceConfig cfg;
  SeededRng rng(cfg.seed);
  const OperatorModel sr = shift_plus_rank_one(random_weights(31, rng), cplx(0.3, 0.4), 2, 32);
  CHECK(kind_of([&] { relation_detect(sr, cfg); }) == ErrorKind::NoRelationFound);
  const RelationSearch search = relation_search(sr, cfg);
  CHECK_FALSE(search.accepted.has_value());
  CHECK(search.best.operator_residual > cfg.relation_tol);
  CHECK(search.scanned.size() >= 4);
}

TEST_CASE("recurrence and annihilation residuals") {
  RVector geo(12), lin(12);
  for (Index k = 0; k < 12; ++k) {
    geo(k) = std::pow(0.5, static_cast<double>(k)) + 3.0;
    lin(k) = static_cast<double>(k * k);
  }
  RelationCertificate c;
  c.n = 1;
  c.m = 1;
  c.degenerate = true;
  c.coefficients << 1.0, -3.0, 0.0, 2.0;
  c.coefficients.normalize();
  CHECK(recurrence_residual(c, geo) <= 1e-14);
  CHECK(recurrence_residual(c, lin) > 1e-3);
  CHECK(annihilation_residual({1.0, -3.0, 2.0}, geo) <= 1e-14);
  CHECK(annihilation_residual({1.0, -3.0, 2.0}, lin) > 1e-3);
}

TEST_CASE("polynomial machinery") {
  const ToleranceConfig cfg = depth5();
  const OperatorModel h = hardy_example(0.5, 24);
  const StructureData hs = structure_extract(h, chain_decomposition(h, cfg), cfg);
  const auto ht = enumerate_triples(hs, cfg);
  REQUIRE(ht.size() >= 1);
  CHECK(kind_of([&] { polynomial_machinery(ht[0], ht[0], hs, cfg); }) == ErrorKind::DegenerateTriples);

  const OperatorModel aq = aq_operator(0.5, 5.0, 24);
  const StructureData as = structure_extract(aq, chain_decomposition(aq, cfg), cfg);
  const auto at = enumerate_triples(as, cfg);
  REQUIRE(at.size() >= 2);
  for (size_t i = 0; i + 1 < std::min<size_t>(at.size(), 4); ++i) {
    const TripleRecord& x = at[i];
    const TripleRecord& y = at[i + 1];
    if (x.gamma_char == y.gamma_char) continue;
    const PolynomialSet p = polynomial_machinery(x, y, as, cfg);
    CHECK_FALSE(p.identically_zero);
    const double c_gap = as.C_values[static_cast<size_t>(x.gamma_char)] - as.C_values[static_cast<size_t>(y.gamma_char)];
    CHECK(std::abs(std::abs(p.constant_term) - std::abs(c_gap)) <= 1e-8);
    CHECK(std::abs(p.constant_term) > cfg.relation_tol);
    CHECK(p.tau_residual <= 1e-8);
    CHECK(p.beta_residual <= 1e-8);
  }
}

TEST_CASE("shift plus rank one reconstruction") {
  ToleranceConfig cfg;
  const cplx a(0.3, 0.4);
  SeededRng rng(cfg.seed);
  const auto w = random_weights(31, rng);
  const OperatorModel sr = shift_plus_rank_one(w, a, 2, 32);
  const ChainDecomposition chain = chain_decomposition(sr, cfg);
  const StructureData s = structure_extract(sr, chain, cfg);
  const auto triples = enumerate_triples(s, cfg);
  REQUIRE(triples.size() == 1);
  const ShiftRankOneCertificate rec = shift_rank_one_reconstruct(sr, s, triples, cfg);
  CHECK(rec.reconstruction_residual <= 1e-8);
  CHECK(rec.orthonormality_residual <= 1e-10);
  CHECK(std::abs(std::abs(rec.a) - std::abs(a)) <= 1e-8);
  for (size_t k = 0; k < rec.weights.size(); ++k) CHECK(std::abs(std::abs(rec.weights[k]) - std::abs(w[k])) <= 1e-8);

  const OperatorModel h = hardy_example(0.5, 24);
  const ToleranceConfig c5 = depth5();
  const StructureData hs = structure_extract(h, chain_decomposition(h, c5), c5);
  const ShiftRankOneCertificate hr = shift_rank_one_reconstruct(h, hs, enumerate_triples(hs, c5), c5);
  CHECK(hr.n == 0);
  CHECK(hr.reconstruction_residual <= 1e-8);
  CHECK(std::abs(hr.a) == doctest::Approx(1.0).epsilon(1e-8));
  for (cplx x : hr.weights) CHECK(std::abs(x) == doctest::Approx(0.5).epsilon(1e-8));

  std::vector<TripleRecord> two = {triples[0], triples[0]};
  CHECK(kind_of([&] { shift_rank_one_reconstruct(sr, s, two, cfg); }) == ErrorKind::NotSingleTriple);
}

TEST_CASE("classification verdicts") {
  ToleranceConfig cfg;
  SeededRng rng(cfg.seed);
  const auto w = random_weights(31, rng);

  const ClassificationReport ws = classify(weighted_shift(w, 32), cfg);
  CHECK(ws.verdict == Verdict::CenteredWeightedShift);
  CHECK(ws.dim_moduli == 1);
  REQUIRE(ws.weighted_shift.has_value());
  CHECK(ws.weighted_shift->residual <= cfg.relation_tol);

  const ClassificationReport sr = classify(shift_plus_rank_one(w, cplx(0.3, 0.4), 2, 32), cfg);
  CHECK(sr.verdict == Verdict::ShiftPlusRankOne);
  CHECK(sr.dim_moduli == 2);
  REQUIRE(sr.reconstruction.has_value());
  CHECK(std::abs(sr.reconstruction->a) == doctest::Approx(0.5).epsilon(1e-8));

  const ClassificationReport aq = classify(aq_operator(0.5, 5.0, 48), cfg);
  CHECK(aq.verdict == Verdict::FourTermRelation);
  REQUIRE(aq.relation.has_value());
  CHECK(std::abs(aq.relation->coefficients(0)) > cfg.relation_tol);
  CHECK(aq.closed_range_flag);
  CHECK(aq.dim_moduli >= 3);

  const ClassificationReport h = classify(hardy_example(0.5, 24), depth5());
  CHECK(h.verdict == Verdict::Both);
  CHECK(std::string(to_string(h.verdict)) == "both");
}

TEST_CASE("classification preconditions") {
  ToleranceConfig cfg;
  CMatrix jordan(2, 2);
  jordan << 1, 1, 0, 1;
  CHECK(kind_of([&] { classify(matrix_model(jordan), cfg); }) == ErrorKind::PreconditionViolated);

  // Two orthogonal shifts: ker T* is two-dimensional.
  const Index half = 16;
  const OperatorModel one = weighted_shift(std::vector<cplx>(half - 1, 1.0), half);
  OperatorModel two = one;
  two.matrix = CMatrix::Zero(2 * half, 2 * half);
  for (Index k = 0; k + 1 < half; ++k) {
    two.matrix(2 * k + 2, 2 * k) = 1.0;
    two.matrix(2 * k + 3, 2 * k + 1) = 1.0;
  }
  two.window_step = 2;
  two.bandwidth = 2;
  CHECK(kind_of([&] { classify(two, cfg); }) == ErrorKind::PreconditionViolated);
}

TEST_CASE("reconstruction round trip on seeded inputs") {
  ToleranceConfig cfg;
  for (std::uint64_t seed : {11u, 12u, 13u}) {
    CAPTURE(seed);
    SeededRng rng(seed);
    const auto w = random_weights(31, rng);
    const cplx a(rng.uniform(0.2, 1.0), rng.uniform(-1.0, 1.0));
    const ClassificationReport r = classify(shift_plus_rank_one(w, a, 2, 32), cfg);
    CHECK(r.verdict == Verdict::ShiftPlusRankOne);
    REQUIRE(r.reconstruction.has_value());
    CHECK(std::abs(std::abs(r.reconstruction->a) - std::abs(a)) <= 1e-8);
    for (size_t k = 0; k < r.reconstruction->weights.size(); ++k)
      CHECK(std::abs(std::abs(r.reconstruction->weights[k]) - std::abs(w[k])) <= 1e-8);
  }
}
