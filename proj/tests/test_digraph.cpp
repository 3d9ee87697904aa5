#include "resopt/digraph.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <set>
#include <sstream>

using namespace resopt;

namespace {

void expect_simple(const WeightedDigraph& g)
{
    std::set<std::pair<NodeId, NodeId>> seen;
    for (const Edge& e : g.edges()) {
        EXPECT_NE(e.src, e.dst);
        EXPECT_LT(e.src, g.node_count());
        EXPECT_LT(e.dst, g.node_count());
        EXPECT_GT(e.weight, 0.0);
        EXPECT_TRUE(seen.emplace(e.src, e.dst).second);
    }
}

// Square: A=0, B=1, C=2, D=3 with A->B, B->C, C->D, A->D.
WeightedDigraph square_example()
{
    return WeightedDigraph(4, {{0, 1, 1}, {1, 2, 1}, {2, 3, 1}, {0, 3, 1}});
}

} // namespace

TEST(WeightedDigraph, RejectsInvariantViolations)
{
    EXPECT_THROW(WeightedDigraph(3, {{0, 0, 1}}), Error);
    EXPECT_THROW(WeightedDigraph(3, {{0, 1, 1}, {0, 1, 2}}), Error);
    EXPECT_THROW(WeightedDigraph(3, {{0, 1, 0}}), Error);
    EXPECT_THROW(WeightedDigraph(3, {{0, 1, -1}}), Error);
    EXPECT_THROW(WeightedDigraph(3, {{0, 3, 1}}), Error);
    EXPECT_NO_THROW(WeightedDigraph(2, {{0, 1, 1}, {1, 0, 1}}));
}

TEST(RandomSparse, PaperScaleEdgeCount)
{
    const auto g = random_sparse(500, 0.99, 11);
    EXPECT_EQ(g.edge_count(), 2495u);
    expect_simple(g);
}

TEST(RandomSparse, FullTwoNode)
{
    const auto g = random_sparse(2, 0.0, 5);
    EXPECT_TRUE(g.has_edge(0, 1));
    EXPECT_TRUE(g.has_edge(1, 0));
}

TEST(RandomSparse, HalfDensity)
{
    const auto g = random_sparse(10, 0.5, 7);
    EXPECT_EQ(g.edge_count(), 45u);
    expect_simple(g);
}

TEST(RandomSparse, EmptyIsAnError)
{
    EXPECT_THROW(random_sparse(10, 0.999, 1), Error);
    EXPECT_THROW(random_sparse(1, 0.5, 1), Error);
}

TEST(WattsStrogatz, PaperScaleEdgeCount)
{
    const auto g = watts_strogatz(500, 10, 0.1, 3);
    EXPECT_EQ(g.edge_count(), 5000u);
    expect_simple(g);
}

TEST(WattsStrogatz, NoRewiringGivesBothRingLattices)
{
    const auto g = watts_strogatz(6, 2, 0.0, 1);
    EXPECT_EQ(g.edge_count(), 12u);
    for (NodeId i = 0; i < 6; ++i) {
        EXPECT_TRUE(g.has_edge(i, (i + 1) % 6));
        EXPECT_TRUE(g.has_edge(i, (i + 5) % 6));
    }
}

TEST(WattsStrogatz, FullRewiringReplaysRngTrace)
{
    // Replay the documented generator: lattice order, one uniform draw per
    // edge, then up to n target draws until a free target is found.
    const std::size_t n = 50, k = 4;
    const auto g = watts_strogatz(n, k, 1.0, 3);
    EXPECT_EQ(g.edge_count(), 200u);
    expect_simple(g);

    Rng rng(3);
    std::set<std::pair<NodeId, NodeId>> edges;
    std::vector<std::pair<NodeId, NodeId>> lattice;
    for (NodeId i = 0; i < n; ++i)
        for (NodeId j = 1; j <= k / 2; ++j) {
            lattice.emplace_back(i, (i + j) % n);
            lattice.emplace_back(i, (i + n - j) % n);
        }
    edges.insert(lattice.begin(), lattice.end());
    std::size_t kept = 0;
    for (auto [s, d] : lattice) {
        (void)rng.uniform01();
        bool moved = false;
        for (std::size_t a = 0; a < n && !moved; ++a) {
            const auto t = static_cast<NodeId>(rng.below(n));
            if (t == s || edges.contains({s, t})) continue;
            edges.erase({s, d});
            edges.insert({s, t});
            moved = true;
        }
        if (!moved) ++kept;
    }
    std::set<std::pair<NodeId, NodeId>> produced;
    for (const Edge& e : g.edges()) produced.emplace(e.src, e.dst);
    EXPECT_EQ(produced, edges);
    EXPECT_EQ(kept, 0u);
}

TEST(WattsStrogatz, RejectsBadParameters)
{
    EXPECT_THROW(watts_strogatz(10, 10, 0.1, 1), Error);
    EXPECT_THROW(watts_strogatz(10, 3, 0.1, 1), Error);
}

TEST(BarabasiAlbert, SeedCoreOnly)
{
    const auto g = barabasi_albert(3, 2, 9);
    EXPECT_EQ(g.edge_count(), 6u);
}

TEST(BarabasiAlbert, ClosedFormEdgeCount)
{
    const auto g = barabasi_albert(100, 8, 1);
    EXPECT_EQ(g.edge_count(), 800u);
    expect_simple(g);
    for (NodeId v = 9; v < 100; ++v) EXPECT_EQ(g.out_degree(v), 8u);
}

TEST(BarabasiAlbert, HeavyTailedInDegree)
{
    int heavy = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto g = barabasi_albert(500, 8, seed);
        std::vector<std::size_t> deg;
        for (NodeId v = 0; v < g.node_count(); ++v) deg.push_back(g.in_degree(v));
        std::sort(deg.begin(), deg.end());
        const double median = 0.5 * static_cast<double>(deg[249] + deg[250]);
        if (static_cast<double>(deg.back()) > 4.0 * median) ++heavy;
    }
    EXPECT_GT(heavy, 10);
}

TEST(Generators, DeterministicPerSeed)
{
    EXPECT_EQ(random_sparse(60, 0.9, 4), random_sparse(60, 0.9, 4));
    EXPECT_EQ(watts_strogatz(60, 6, 0.3, 4), watts_strogatz(60, 6, 0.3, 4));
    EXPECT_EQ(barabasi_albert(60, 3, 4), barabasi_albert(60, 3, 4));
    EXPECT_FALSE(random_sparse(60, 0.9, 4) == random_sparse(60, 0.9, 5));
}

TEST(Generators, InvariantsAcrossSeeds)
{
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        expect_simple(random_sparse(40, 0.9, seed));
        expect_simple(watts_strogatz(40, 6, 0.5, seed));
        expect_simple(barabasi_albert(40, 4, seed));
    }
}

TEST(AdjacencyMatrix, Basics)
{
    const WeightedDigraph ring(3, {{0, 1, 1}, {1, 2, 1}, {2, 0, 1}});
    DenseMatrix expected = DenseMatrix::Zero(3, 3);
    expected(0, 1) = expected(1, 2) = expected(2, 0) = 1;
    EXPECT_EQ(adjacency_matrix(ring), expected);
    EXPECT_EQ(adjacency_matrix(WeightedDigraph(4, {})), DenseMatrix::Zero(4, 4));

    DenseMatrix want = DenseMatrix::Zero(4, 4);
    want(0, 1) = want(1, 2) = want(2, 3) = want(0, 3) = 1;
    EXPECT_EQ(adjacency_matrix(square_example()), want);
}

TEST(OrthogonalityMeasurement, ClosedForms)
{
    EXPECT_DOUBLE_EQ(orthogonality_measurement(DenseMatrix::Identity(7, 7)), 0.0);
    // Zero column A pairs with three columns (3), (B,D) contributes 1/sqrt(2).
    const double expected = (3.0 + 1.0 / std::sqrt(2.0)) / 6.0;
    EXPECT_NEAR(orthogonality_measurement(adjacency_matrix(square_example())), expected, 1e-12);
    EXPECT_NEAR(expected, 0.61785, 1e-5);

    const auto flipped = flip_edge(square_example(), 0, 3);
    EXPECT_EQ(orthogonality_measurement(adjacency_matrix(flipped)), 0.0);

    DenseMatrix twin(3, 2);
    twin << 1, 1, 2, 2, 0, 0;
    EXPECT_NEAR(orthogonality_measurement(twin), 1.0, 1e-15);
    EXPECT_THROW(orthogonality_measurement(DenseMatrix::Ones(3, 1)), Error);
}

TEST(OrthogonalityMeasurement, PermutationAndScaleInvariance)
{
    Rng rng(21);
    for (int trial = 0; trial < 20; ++trial) {
        DenseMatrix m = adjacency_matrix(random_sparse(12, 0.7, 100 + trial));
        const double base = orthogonality_measurement(m);
        EXPECT_GE(base, 0.0);
        EXPECT_LE(base, 1.0);

        std::vector<int> perm(12);
        for (int i = 0; i < 12; ++i) perm[i] = i;
        for (int i = 11; i > 0; --i) std::swap(perm[i], perm[rng.below(i + 1)]);
        DenseMatrix permuted(12, 12);
        for (int c = 0; c < 12; ++c) permuted.col(c) = m.col(perm[c]) * (0.5 + rng.uniform01());
        EXPECT_NEAR(orthogonality_measurement(permuted), base, 1e-12);
    }
    // Permutation matrices are perfectly orthogonal.
    DenseMatrix p = DenseMatrix::Zero(5, 5);
    const int sigma[] = {3, 0, 4, 1, 2};
    for (int i = 0; i < 5; ++i) p(i, sigma[i]) = 1;
    EXPECT_EQ(orthogonality_measurement(p), 0.0);
}

TEST(SpectralRadius, Closed)
{
    DenseMatrix cyc = DenseMatrix::Zero(9, 9);
    for (int i = 0; i < 9; ++i) cyc(i, (i + 1) % 9) = 1;
    EXPECT_NEAR(spectral_radius(cyc), 1.0, 1e-12);

    DenseMatrix d = DenseMatrix::Zero(3, 3);
    d.diagonal() << 0.3, -0.9, 0.5;
    EXPECT_DOUBLE_EQ(spectral_radius(d), 0.9);
    EXPECT_EQ(spectral_radius(DenseMatrix::Zero(4, 4)), 0.0);
    EXPECT_THROW(spectral_radius(DenseMatrix::Zero(2, 3)), Error);

    // Strictly upper-triangular (nilpotent) pattern is exactly zero.
    DenseMatrix upper = DenseMatrix::Zero(6, 6);
    for (int i = 0; i < 5; ++i) upper(i, i + 1) = 1;
    EXPECT_EQ(spectral_radius(upper), 0.0);
}

TEST(SpectralRadius, QrOracleValidatesOnDiagonals)
{
    const std::vector<std::vector<double>> diag = {{0.3, 0, 0}, {0, -0.9, 0}, {0, 0, 0.5}};
    EXPECT_NEAR(oracle::spectral_radius_qr(diag), 0.9, 1e-14);
    std::vector<std::vector<double>> rot = {{0, -2}, {2, 0}};
    EXPECT_NEAR(oracle::spectral_radius_qr(rot), 2.0, 1e-12);
}

TEST(SpectralRadius, MatchesQrOracleOnRandomDense)
{
    Rng rng(77);
    for (int trial = 0; trial < 5; ++trial) {
        DenseMatrix m(50, 50);
        std::vector<std::vector<double>> plain(50, std::vector<double>(50));
        for (int i = 0; i < 50; ++i)
            for (int j = 0; j < 50; ++j) plain[i][j] = m(i, j) = rng.uniform(-1, 1);
        EXPECT_NEAR(spectral_radius(m), oracle::spectral_radius_qr(plain), 1e-6);
    }
}

TEST(ScaleToSpectralRadius, RingAndRandom)
{
    std::vector<Edge> ring;
    for (NodeId i = 0; i < 10; ++i) ring.push_back({i, (i + 1) % 10, 1});
    const DenseMatrix w = scale_to_spectral_radius(WeightedDigraph(10, ring), 0.8);
    for (const Edge& e : ring) EXPECT_NEAR(w(e.src, e.dst), 0.8, 1e-12);
    EXPECT_NEAR(w.sum(), 8.0, 1e-10);

    const DenseMatrix r = scale_to_spectral_radius(random_sparse(100, 0.95, 4), 0.8);
    EXPECT_NEAR(spectral_radius(r), 0.8, 1e-6);

    const WeightedDigraph dag(3, {{0, 1, 1}, {1, 2, 1}, {0, 2, 1}});
    EXPECT_THROW(scale_to_spectral_radius(dag, 0.8), Error);
}

TEST(IsRing, Cases)
{
    const WeightedDigraph tri(3, {{0, 1, 1}, {1, 2, 1}, {2, 0, 1}});
    EXPECT_TRUE(is_ring(tri, EdgeSequence{{0, 1, 2}}));
    EXPECT_FALSE(is_ring(tri, EdgeSequence{{0, 2, 1}}));
    EXPECT_FALSE(is_ring(square_example(), EdgeSequence{{0, 1, 2, 3}}));
    const WeightedDigraph bigon(2, {{0, 1, 1}, {1, 0, 1}});
    EXPECT_TRUE(is_ring(bigon, EdgeSequence{{0, 1}}));
}

TEST(FlipEdge, SquareAndInvolution)
{
    const auto g = square_example();
    const auto flipped = flip_edge(g, 0, 3);
    EXPECT_TRUE(is_ring(flipped, EdgeSequence{{0, 1, 2, 3}}));
    EXPECT_EQ(flip_edge(flipped, 3, 0), g);
    EXPECT_EQ(flipped.edge_count(), g.edge_count());

    const WeightedDigraph bigon(2, {{0, 1, 1}, {1, 0, 1}});
    EXPECT_THROW(flip_edge(bigon, 0, 1), Error);
    EXPECT_THROW(flip_edge(g, 3, 1), Error);
}

TEST(FlipEdge, PreservesWeightMultiset)
{
    const WeightedDigraph g(4, {{0, 1, 0.5}, {1, 2, 2.0}, {2, 3, 1.5}});
    const auto f = flip_edge(g, 1, 2);
    std::multiset<double> a, b;
    for (const Edge& e : g.edges()) a.insert(e.weight);
    for (const Edge& e : f.edges()) b.insert(e.weight);
    EXPECT_EQ(a, b);
    EXPECT_EQ(f.edge(*f.find_edge(2, 1)).weight, 2.0);
}

TEST(EdgeListFormat, RoundTrip)
{
    const WeightedDigraph g(5, {{0, 1, 0.1}, {3, 2, 2.5}, {4, 0, 1}});
    std::stringstream ss;
    write_edge_list(ss, g);
    EXPECT_EQ(ss.str(), "nodes 5\n0 1 0.1\n3 2 2.5\n4 0 1\n");
    EXPECT_EQ(read_edge_list(ss), g);
    std::istringstream bad("0 1 1\n");
    EXPECT_THROW(read_edge_list(bad), Error);
}

TEST(MatrixCsv, RowMajor)
{
    DenseMatrix m(2, 2);
    m << 1, 0.5, 0, -2;
    std::ostringstream os;
    write_matrix_csv(os, m);
    EXPECT_EQ(os.str(), "1,0.5\n0,-2\n");
}
