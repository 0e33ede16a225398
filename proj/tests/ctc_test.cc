// Copyright 2026 The advocr Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "advocr/ctc.h"
#include "advocr/error.h"
#include "advocr/gradcheck.h"
#include "oracles.h"

namespace advocr {
namespace {

ProbLattice Uniform(std::size_t m, std::size_t k) {
  return ProbLattice(m, k, std::vector<double>(m * k, 1.0 / k));
}

std::vector<int> RandomTarget(std::mt19937_64& rng, std::size_t max_len,
                              std::size_t labels, std::size_t timesteps) {
  std::uniform_int_distribution<std::size_t> len(1, max_len);
  std::uniform_int_distribution<int> lab(0, static_cast<int>(labels) - 1);
  while (true) {
    std::vector<int> t(len(rng));
    for (int& v : t) v = lab(rng);
    if (MinTimesteps(t) <= timesteps) return t;
  }
}

TEST(Alphabet, EncodeDecode) {
  const Alphabet a = Alphabet::LowercaseWithSpace();
  EXPECT_EQ(a.size(), 27u);
  EXPECT_EQ(a.blank(), 27);
  EXPECT_EQ(a.Encode("ab z"), (Transcript{0, 1, 26, 25}));
  EXPECT_EQ(a.Decode(a.Encode("hello world")), "hello world");
  EXPECT_THROW(a.Encode("May"), InvalidArgument);
}

TEST(Alphabet, RejectsDuplicates) {
  EXPECT_THROW(Alphabet("aba"), InvalidArgument);
  EXPECT_THROW(Alphabet(""), InvalidArgument);
}

TEST(Collapse, MergesThenDropsBlanks) {
  const int b = 2;
  EXPECT_EQ(Collapse(std::vector<int>{0, 0, b, 0}, b), (Transcript{0, 0}));
  EXPECT_EQ(Collapse(std::vector<int>{b, 1, 1, b, b}, b), (Transcript{1}));
  EXPECT_TRUE(Collapse(std::vector<int>{b, b}, b).empty());
}

TEST(MinTimesteps, CountsSeparatorsBetweenRepeats) {
  EXPECT_EQ(MinTimesteps(std::vector<int>{0, 1}), 2u);
  EXPECT_EQ(MinTimesteps(std::vector<int>{0, 0}), 3u);
  EXPECT_EQ(MinTimesteps(std::vector<int>{0, 0, 0, 1, 1}), 8u);
  EXPECT_EQ(MinTimesteps(std::vector<int>{}), 0u);
}

TEST(EnumerateAlignments, SmallCaseByHand) {
  // K = 2 (label a + blank), M = 2, target [a]: aa, a-, -a.
  const auto paths = EnumerateAlignments(std::vector<int>{0}, 2, 2);
  EXPECT_EQ(paths.size(), 3u);
}

TEST(EnumerateAlignments, MatchesBruteForceFilter) {
  const std::vector<int> target = {0, 1, 1};
  const std::size_t m = 6, k = 3;
  std::size_t expected = 0;
  oracle::ForEachPath(m, k, [&](const std::vector<int>& p) {
    expected += oracle::CollapsePath(p, 2) == target;
  });
  EXPECT_EQ(EnumerateAlignments(target, m, k).size(), expected);
}

TEST(CtcLoss, UniformTwoByTwo) {
  // Three valid paths of probability 1/4 each.
  const CtcResult r = CtcLoss(Uniform(2, 2), std::vector<int>{0});
  EXPECT_NEAR(r.loss, -std::log(0.75), 1e-12);
}

TEST(CtcLoss, MatchesBruteForceOnRandomLattices) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t k = 2 + trial % 3;  // 1..3 labels + blank
    const std::size_t m = 1 + trial % 7;
    const auto probs = oracle::RandomLattice(rng, m, k);
    const auto target = RandomTarget(rng, 3, k - 1, m);
    const double brute = oracle::BruteCtcLoss(probs, m, k, target);
    const double dp = CtcLoss(ProbLattice(m, k, probs), target).loss;
    EXPECT_NEAR(dp, brute, 1e-9) << "trial " << trial;
  }
}

TEST(CtcLoss, InfeasibleTargetThrows) {
  EXPECT_THROW(CtcLoss(Uniform(2, 2), std::vector<int>{0, 0}),
               InfeasibleTargetError);
  try {
    CtcLoss(Uniform(2, 3), std::vector<int>{0, 1, 0});
    FAIL();
  } catch (const InfeasibleTargetError& e) {
    EXPECT_EQ(e.required(), 3u);
    EXPECT_EQ(e.available(), 2u);
  }
}

TEST(CtcLoss, GradientIsMinusOccupancy) {
  // Each timestep's occupancy over labels sums to one.
  std::mt19937_64 rng(3);
  const auto probs = oracle::RandomLattice(rng, 5, 3);
  const CtcResult r = CtcLoss(ProbLattice(5, 3, probs), std::vector<int>{0, 1});
  for (std::size_t t = 0; t < 5; ++t) {
    double row = 0.0;
    for (std::size_t kk = 0; kk < 3; ++kk) {
      EXPECT_LE(r.grad[t * 3 + kk], 1e-12);
      row += r.grad[t * 3 + kk];
    }
    EXPECT_NEAR(row, -1.0, 1e-9);
  }
}

TEST(CtcLoss, GradientFiniteDifference) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t m = 3 + trial % 4, k = 3;
    const auto probs = oracle::RandomLattice(rng, m, k);
    const auto target = RandomTarget(rng, 2, k - 1, m);
    const Tensor logp = ProbLattice(m, k, probs).LogProbs();
    const CtcResult r = CtcLossFromLogProbs(logp, target);
    const GradCheckReport rep = FiniteDiffCheck(
        [&](const Tensor& lp) { return CtcLossFromLogProbs(lp, target).loss; },
        logp, r.grad, 1e-5);
    EXPECT_LE(rep.max_rel_error, 1e-4) << "trial " << trial;
  }
}

TEST(ProbLattice, RejectsBadRows) {
  EXPECT_THROW(ProbLattice(1, 2, {0.7, 0.7}), InvalidArgument);
  EXPECT_THROW(ProbLattice(1, 2, {1.2, -0.2}), InvalidArgument);
  EXPECT_THROW(ProbLattice(2, 2, {0.5, 0.5}), ShapeError);
}

TEST(ProbLattice, MeanMaxProbability) {
  const ProbLattice l(2, 2, {0.9, 0.1, 0.3, 0.7});
  EXPECT_NEAR(l.MeanMaxProbability(), 0.8, 1e-12);
}

TEST(GreedyDecode, ArgmaxThenCollapse) {
  // rows: a, a, blank, a, b  -> "aab"
  const ProbLattice l(5, 3,
                      {0.8, 0.1, 0.1, 0.6, 0.3, 0.1, 0.1, 0.1, 0.8, 0.5, 0.2,
                       0.3, 0.2, 0.7, 0.1});
  EXPECT_EQ(GreedyDecode(l), (Transcript{0, 0, 1}));
}

TEST(GreedyDecode, TiesGoToLowestIndex) {
  EXPECT_EQ(GreedyDecode(ProbLattice(1, 3, {0.4, 0.4, 0.2})), (Transcript{0}));
}

TEST(BeamDecode, ScoreBoundedByTranscriptMass) {
  // A narrow beam only loses alignments, so its score bounds the true mass.
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 30; ++trial) {
    const auto probs = oracle::RandomLattice(rng, 5, 3);
    const auto masses = oracle::TranscriptMasses(probs, 5, 3);
    const BeamResult r = BeamDecode(ProbLattice(5, 3, probs), 2);
    EXPECT_LE(r.log_score, std::log(masses.at(r.transcript)) + 1e-12);
  }
}

TEST(BeamDecode, ExhaustiveWidthFindsMostProbableTranscript) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t m = 2 + trial % 4, k = 3;
    const auto probs = oracle::RandomLattice(rng, m, k);
    const auto masses = oracle::TranscriptMasses(probs, m, k);
    auto best = masses.begin();
    for (auto it = masses.begin(); it != masses.end(); ++it) {
      if (it->second > best->second) best = it;
    }
    std::size_t width = 1;
    for (std::size_t i = 0; i < m; ++i) width *= k;
    const BeamResult r = BeamDecode(ProbLattice(m, k, probs), width);
    EXPECT_EQ(r.transcript, best->first) << "trial " << trial;
    EXPECT_NEAR(r.log_score, std::log(best->second), 1e-9);
  }
}

TEST(BeamDecode, ScoreMonotoneInWidth) {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 40; ++trial) {
    const auto probs = oracle::RandomLattice(rng, 5, 3, 1.0);
    const ProbLattice l(5, 3, probs);
    double prev = -INFINITY;
    for (std::size_t w : {1, 2, 4, 8, 16, 64, 243}) {
      const double s = BeamDecode(l, w).log_score;
      EXPECT_GE(s, prev - 1e-12) << "trial " << trial << " width " << w;
      prev = s;
    }
  }
}

TEST(BeamDecode, ZeroWidthThrows) {
  EXPECT_THROW(BeamDecode(Uniform(2, 2), 0), InvalidArgument);
}

}  // namespace
}  // namespace advocr
