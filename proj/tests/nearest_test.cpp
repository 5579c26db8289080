#include <gtest/gtest.h>

#include <random>

#include "redugoal/nearest.hpp"

using namespace redugoal;

namespace {

std::vector<double> random_point(std::mt19937_64& rng, std::size_t dim) {
  std::uniform_real_distribution<double> u(-6.0, 6.0);
  std::vector<double> p(dim);
  for (auto& x : p) x = u(rng);
  return p;
}

}  // namespace

TEST(Nearest, KdTreeMatchesLinearScan) {
  for (std::size_t dim : {2u, 6u}) {
    std::mt19937_64 rng(71 + dim);
    auto lin = make_nearest(NeighborStructure::linear, dim);
    auto kd = make_nearest(NeighborStructure::kdtree, dim);
    for (int n = 0; n < 3000; ++n) {
      const auto p = random_point(rng, dim);
      lin->add(p);
      kd->add(p);
      if (n % 37 == 0) {
        const auto q = random_point(rng, dim);
        EXPECT_EQ(kd->nearest(q), lin->nearest(q));
        EXPECT_EQ(kd->k_nearest(q, 10), lin->k_nearest(q, 10));
      }
    }
    EXPECT_EQ(kd->size(), 3000u);
  }
}

TEST(Nearest, TiesPreferLowerIndex) {
  for (auto s : {NeighborStructure::linear, NeighborStructure::kdtree}) {
    auto nn = make_nearest(s, 2);
    nn->add(std::vector<double>{1.0, 0.0});
    nn->add(std::vector<double>{-1.0, 0.0});
    nn->add(std::vector<double>{0.0, 1.0});
    EXPECT_EQ(nn->nearest(std::vector<double>{0.0, 0.0}), 0u) << to_string(s);
    EXPECT_EQ(nn->k_nearest(std::vector<double>{0.0, 0.0}, 2), (std::vector<std::size_t>{0, 1})) << to_string(s);
  }
}

TEST(Nearest, KLargerThanSizeReturnsAll) {
  auto nn = make_nearest(NeighborStructure::kdtree, 1);
  nn->add(std::vector<double>{3.0});
  nn->add(std::vector<double>{1.0});
  EXPECT_EQ(nn->k_nearest(std::vector<double>{0.0}, 5), (std::vector<std::size_t>{1, 0}));
}

TEST(Nearest, ParseNames) {
  EXPECT_EQ(parse_neighbor_structure("kdtree"), NeighborStructure::kdtree);
  EXPECT_EQ(parse_neighbor_structure("linear"), NeighborStructure::linear);
  EXPECT_THROW(parse_neighbor_structure("ball"), std::invalid_argument);
}
