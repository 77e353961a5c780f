#include <cmath>

#include <gtest/gtest.h>

#include "rectlat/io.hpp"
#include "rectlat/phasescan.hpp"

using rectlat::PhaseDiagramRow;
using rectlat::RowOrder;

namespace {

constexpr double kTriA = 2.7163619942262467;
constexpr double kTriV1 = 6.7951845011079;

std::vector<PhaseDiagramRow> rows_with(const std::vector<PhaseDiagramRow>& rows, RowOrder o,
                                       const std::string& status = "ok")
{
    std::vector<PhaseDiagramRow> out;
    for (const auto& r : rows) {
        if (r.order == o && r.status == status) out.push_back(r);
    }
    return out;
}

} // namespace

TEST(Grid, ParsesLinearAndLog)
{
    const auto lin = rectlat::parse_grid("1:2:lin:5").values();
    ASSERT_EQ(lin.size(), 5u);
    EXPECT_EQ(lin.front(), 1.0);
    EXPECT_EQ(lin.back(), 2.0);
    EXPECT_DOUBLE_EQ(lin[2], 1.5);
    const auto lg = rectlat::parse_grid("0.1:1000:log:5").values();
    EXPECT_NEAR(lg[1], 1.0, 1e-14);
    EXPECT_EQ(lg.back(), 1000.0);
    EXPECT_EQ(rectlat::parse_grid("3:3:lin:1").values(), std::vector<double>{3.0});
}

TEST(Grid, RejectsMalformedText)
{
    for (const char* bad : {"1:2:lin", "1:2:cubic:4", "a:2:lin:4", "1:2:lin:x", "2:1:lin:4", "0:1:log:4",
                            "1:2:lin:0", "1:2:lin:4:5", "1e:2:lin:4"}) {
        EXPECT_THROW(rectlat::parse_grid(bad), rectlat::DomainError) << bad;
    }
}

TEST(RowOrder, Names)
{
    EXPECT_EQ(rectlat::to_string(RowOrder::Second), "second");
    EXPECT_EQ(rectlat::to_string(RowOrder::First), "first");
    EXPECT_EQ(rectlat::to_string(RowOrder::Tricritical), "tricritical");
    EXPECT_EQ(rectlat::to_string(RowOrder::None), "");
}

TEST(CriticalCurve, SecondOrderBranchShape)
{
    const auto grid = rectlat::parse_grid("7:200:log:8").values();
    const auto rows = rectlat::scan_critical_curve(2.0, grid);
    const auto second = rows_with(rows, RowOrder::Second);
    ASSERT_EQ(second.size(), grid.size());
    for (std::size_t i = 1; i < second.size(); ++i) {
        // v1 increasing along the grid with A* decreasing: v1(A*) is a decreasing function.
        EXPECT_LT(second[i].a_star, second[i - 1].a_star);
        EXPECT_GT(second[i].v1, second[i - 1].v1);
    }
    for (const auto& r : second) {
        EXPECT_LT(r.a_star, kTriA);
        EXPECT_GT(r.a_star, 2.186262818188);
        EXPECT_GT(r.e4_value, 0.0);
        EXPECT_EQ(r.eps_jump, 0.0);
        EXPECT_LT(std::abs(r.e2_residual), 1e-12);
    }
}

TEST(CriticalCurve, EndsAtTricriticalPoint)
{
    const std::vector<double> grid{kTriV1 * (1 - 1e-3), kTriV1 * (1 + 1e-3)};
    rectlat::ScanOptions o;
    o.refine_order_changes = false;
    const auto rows = rectlat::scan_critical_curve(2.0, grid, o);
    // first-order row + prolongation row, then the second-order row
    ASSERT_EQ(rows.size(), 3u);
    EXPECT_EQ(rows[0].order, RowOrder::First);
    EXPECT_EQ(rows[0].status, "ok");
    EXPECT_EQ(rows[1].status, "prolongation");
    EXPECT_LT(rows[1].e4_value, 0.0);
    EXPECT_EQ(rows[2].order, RowOrder::Second);
    for (const auto& r : {rows[1], rows[2]}) EXPECT_NEAR(r.a_star, kTriA, 1e-3);
    EXPECT_GT(rows[0].eps_jump, 0.0);
    EXPECT_LT(rows[0].a_star, rows[1].a_star);
}

TEST(CriticalCurve, LargeCouplingApproachesLimit)
{
    const auto rows = rectlat::scan_critical_curve(2.0, {1e4, 1e5});
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_NEAR(rows[1].a_star, 2.18626, 1e-4);
    EXPECT_LT(rows[1].a_star, rows[0].a_star);
}

TEST(CriticalCurve, RefinesWhereOrderChanges)
{
    const std::vector<double> grid{6.0, 7.0, 8.0};
    const auto rows = rectlat::scan_critical_curve(2.0, grid);
    std::vector<double> v1s;
    for (const auto& r : rows) {
        if (r.status != "prolongation") v1s.push_back(r.v1);
    }
    ASSERT_EQ(v1s.size(), 4u);
    EXPECT_EQ(v1s[1], 6.5);
    EXPECT_TRUE(std::is_sorted(v1s.begin(), v1s.end()));
}

TEST(CriticalCurve, OutOfDomainRowsAreKept)
{
    const auto rows = rectlat::scan_critical_curve(2.0, {2.0, 3.0, 9.8});
    ASSERT_EQ(rows.size(), 3u);
    EXPECT_EQ(rows[0].status, "out-of-domain");
    EXPECT_EQ(rows[1].status, "out-of-domain");
    EXPECT_TRUE(std::isnan(rows[0].a_star));
    EXPECT_NEAR(rows[2].a_star, 2.61449322978, 1e-9);
    EXPECT_THROW(rectlat::scan_critical_curve(2.0, {9.8, 7.0}), rectlat::DomainError);
}

TEST(CriticalCurve, IdenticalForAnyWorkerCount)
{
    const auto grid = rectlat::parse_grid("4:60:log:9").values();
    rectlat::ScanOptions o;
    o.workers = 1;
    const std::string one = rectlat::to_csv(rectlat::scan_critical_curve(2.0, grid, o));
    o.workers = 4;
    const std::string four = rectlat::to_csv(rectlat::scan_critical_curve(2.0, grid, o));
    o.workers = 9;
    const std::string nine = rectlat::to_csv(rectlat::scan_critical_curve(2.0, grid, o));
    EXPECT_EQ(one, four);
    EXPECT_EQ(one, nine);
}

TEST(CriticalCurve, OrderAgreesWithEnergyCheck)
{
    const auto rows = rectlat::scan_critical_curve(2.0, {5.0, 6.0, 9.8, 30.0});
    int checked = 0;
    for (const auto& r : rows) {
        if (r.status != "ok") continue;
        const auto spec = rectlat::derive_double_yukawa(r.v1, r.kappa1);
        if (r.order == RowOrder::Second) {
            // Continuous onset: eps ~ amplitude * sqrt(A - A*), tiny just above A*.
            EXPECT_LT(rectlat::minimize_aspect(spec, r.a_star * (1 + 1e-11)).eps, 1e-4);
        } else {
            // Jump: a rectangle distinctly away from the square just above A_trans.
            EXPECT_GT(rectlat::minimize_aspect(spec, r.a_star * (1 + 1e-12)).eps, 1e-2);
            EXPECT_GT(r.eps_jump, 1e-2);
        }
        ++checked;
    }
    EXPECT_GE(checked, 3);
}

TEST(TricriticalLocus, TrendsAndEnds)
{
    const auto locus = rectlat::scan_tricritical_locus({1.2, 1.6, 1.8, 2.0});
    ASSERT_EQ(locus.rows.size(), 4u);
    EXPECT_EQ(locus.rows[0].status, "out-of-domain");
    for (std::size_t i = 2; i < 4; ++i) {
        EXPECT_EQ(locus.rows[i].order, RowOrder::Tricritical);
        EXPECT_LT(locus.rows[i].v1, locus.rows[i - 1].v1);
        EXPECT_GT(locus.rows[i].a_star, locus.rows[i - 1].a_star);
    }
    EXPECT_NEAR(locus.rows[3].a_star, kTriA, 1e-10 * kTriA);
    EXPECT_NEAR(locus.rows[3].v1, kTriV1, 1e-9 * kTriV1);
    EXPECT_EQ(locus.boundary_status, "ok");
    EXPECT_GE(locus.kappa1_lower, 1.43);
    EXPECT_LE(locus.kappa1_lower, 1.44);
    EXPECT_GT(locus.kappa1_upper, 2.0);

    const auto rows = rectlat::locus_rows(locus);
    ASSERT_EQ(rows.size(), 6u);
    EXPECT_EQ(rows[4].status, "kappa1-lower");
    EXPECT_EQ(rows[5].status, "kappa1-upper");
    // At the upper end the tricritical v1 sits on the border e^{kappa1}/kappa1.
    EXPECT_NEAR(rows[5].v1, std::exp(rows[5].kappa1) / rows[5].kappa1, 1e-12);
}

TEST(AStarMinScan, MonotoneWithReferenceRow)
{
    const auto rows = rectlat::scan_a_star_min({0.1, 0.5, 1.0, 2.0, 8.0, 50.0});
    for (std::size_t i = 1; i < rows.size(); ++i) EXPECT_LT(rows[i].a_star, rows[i - 1].a_star);
    EXPECT_NEAR(rows[3].a_star, 2.186262818188, 1e-9 * 2.186262818188);
    EXPECT_EQ(rows[0].status, "limit");
    EXPECT_TRUE(std::isinf(rows[0].v1));
    EXPECT_GT(rows.back().a_star, 1.0);
    EXPECT_LT(rows.front().a_star, 5.71344);
}

TEST(AStarMinScan, FailuresRecordedPerRow)
{
    const auto rows = rectlat::scan_a_star_min({2.0, 1000.0});
    EXPECT_EQ(rows[0].status, "limit");
    EXPECT_TRUE(rows[1].status.starts_with("failed")) << rows[1].status;
}

TEST(YukawaCoulombScan, PhaseDiagramRows)
{
    const auto rows = rectlat::scan_yukawa_coulomb({2.0365, 2.2, 2.5});
    const auto tri = rows_with(rows, RowOrder::Tricritical);
    ASSERT_EQ(tri.size(), 1u);
    EXPECT_NEAR(tri[0].a_star, 2.795433950879, 1e-9 * 2.8);
    EXPECT_NEAR(tri[0].kappa1, 2.036517758847, 1e-9 * 2.04);
    const auto first = rows_with(rows, RowOrder::First);
    ASSERT_GE(first.size(), 1u);
    EXPECT_EQ(first[0].kappa1, 2.0365);
    EXPECT_NEAR(first[0].a_star, 2.795443562576, 1e-9 * 2.8);
    for (const auto& r : rows_with(rows, RowOrder::Second)) EXPECT_GT(r.kappa1, tri[0].kappa1);
    for (std::size_t i = 1; i < rows.size(); ++i) EXPECT_LE(rows[i - 1].kappa1, rows[i].kappa1);
}
