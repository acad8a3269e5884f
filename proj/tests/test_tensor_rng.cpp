#include <doctest.h>

#include <set>

#include "asa/errors.hpp"
#include "asa/hash.hpp"
#include "asa/rng.hpp"
#include "asa/tensor.hpp"

using namespace asa;
using namespace asa::nn;

TEST_CASE("tensor shape bookkeeping") {
  Tensor t({2, 3, 4}, 1.5);
  CHECK(t.size() == 24);
  CHECK(t.at(1, 2, 3) == 1.5);
  t.at(1, 2, 3) = 2.0;
  CHECK(t[23] == 2.0);
  t.reshape({6, 4});
  CHECK(t.at(5, 3) == 2.0);
  CHECK_THROWS_AS(t.reshape({5, 5}), UsageError);
  CHECK_THROWS_AS(Tensor({2, 2}, std::vector<double>{1.0}), UsageError);
  CHECK(shape_to_string({2, 3}) == "[2 x 3]");
}

TEST_CASE("gemm handles transposed and strided operands") {
  // a is 2x3, b is 3x2.
  const std::vector<double> a = {1, 2, 3, 4, 5, 6};
  const std::vector<double> b = {7, 8, 9, 10, 11, 12};
  std::vector<double> c(4, 0.0);
  gemm(mutable_view(c.data(), 2, 2), view(a.data(), 2, 3), view(b.data(), 3, 2), false);
  CHECK(c == std::vector<double>{58, 64, 139, 154});
  // a^T a via the transposed flag: 3x3.
  std::vector<double> ata(9, 0.0);
  gemm(mutable_view(ata.data(), 3, 3), view(a.data(), 2, 3).t(), view(a.data(), 2, 3), false);
  CHECK(ata == std::vector<double>{17, 22, 27, 22, 29, 36, 27, 36, 45});
  // Accumulate using a strided view over the first two columns of a.
  std::vector<double> acc(4, 1.0);
  gemm(mutable_view(acc.data(), 2, 2), MatrixView{a.data(), 2, 2, 3}, view(b.data(), 2, 2), true);
  CHECK(acc == std::vector<double>{1 + 25, 1 + 28, 1 + 73, 1 + 82});
  CHECK_THROWS_AS(gemm(mutable_view(c.data(), 2, 2), view(a.data(), 2, 3), view(b.data(), 2, 3), false),
                  UsageError);
}

TEST_CASE("seeded streams are reproducible and sub-keys are independent") {
  SeededRng a(42), b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.uniform() == b.uniform());
  SeededRng root(42);
  std::set<double> firsts;
  for (const char* key : {"init", "dropout", "noise", "shuffle", "split", "balance", "lime", "synth"}) {
    firsts.insert(root.derive(key).uniform());
  }
  CHECK(firsts.size() == 8);
  CHECK(root.derive(3).uniform() == root.derive(3).uniform());
  CHECK(root.derive(3).uniform() != root.derive(4).uniform());
  CHECK(SeededRng(1).uniform() != SeededRng(2).uniform());
}

TEST_CASE("below() is uniform over its range") {
  SeededRng rng(5);
  std::vector<int> counts(3, 0);
  for (int i = 0; i < 30000; ++i) ++counts[rng.below(3)];
  for (const int c : counts) CHECK(c == doctest::Approx(10000).epsilon(0.03));
}

TEST_CASE("sha256 of known strings") {
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}
