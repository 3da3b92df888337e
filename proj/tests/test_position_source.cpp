#include <catch2/catch_amalgamated.hpp>

#include <map>

#include "chessforge/source/position_source.hpp"

using namespace chessforge;

namespace {

std::vector<SourcedPosition> drain(PositionStream& s) {
    std::vector<SourcedPosition> out;
    while (auto p = s.next())
        out.push_back(*p);
    return out;
}

PositionStream clock_stream(int n) {
    // n distinct boards tagged through the halfmove clock.
    std::vector<SourcedPosition> items;
    for (int i = 0; i < n; ++i) {
        Board b = start_position();
        b.halfmove_clock = i;
        items.push_back({b, 0, "synthetic"});
    }
    return PositionStream(std::move(items));
}

} // namespace

TEST_CASE("load_fens skips comments and reports bad lines") {
    std::vector<SourceDiagnostic> diags;
    auto stream = load_fens("tests/data/sample.fen", &diags);
    auto items = drain(stream);
    REQUIRE(items.size() == 3);
    CHECK(items[0].board == start_position());
    CHECK(items[0].ply_index == 0);
    CHECK(items[1].ply_index == 4);
    CHECK(items[2].board.en_passant.has_value());
    REQUIRE(diags.size() == 1);
    CHECK(diags[0].where == "tests/data/sample.fen:5");

    CHECK_THROWS_AS(load_fens("tests/data/sample.fen", nullptr, true),
                    ParseError);
    CHECK_THROWS_AS(load_fens("tests/data/no_such.fen"), ChessError);

    auto empty = load_fens("tests/data/empty.fen");
    CHECK(drain(empty).empty());
}

TEST_CASE("load_pgn replays SAN and skips broken games") {
    std::vector<SourceDiagnostic> diags;
    auto stream = load_pgn("tests/data/sample.pgn", &diags);
    auto items = drain(stream);

    // Game 1 contributes its start plus ten plies; game 2 is skipped whole.
    REQUIRE(items.size() == 11);
    CHECK(items[0].board == start_position());
    CHECK(items[0].ply_index == 0);
    CHECK(emit_fen(items[2].board) ==
          "rnbqkbnr/pppp1ppp/8/4p3/4P3/8/PPPP1PPP/RNBQKBNR w KQkq e6 0 2");
    CHECK(items[10].ply_index == 10);
    CHECK(emit_fen(items[10].board) ==
          "r1bqk2r/1pppbppp/p1n2n2/4p3/B3P3/5N2/PPPP1PPP/RNBQ1RK1 w kq - 4 6");

    REQUIRE(diags.size() == 1);
    CHECK(diags[0].where == "tests/data/sample.pgn:game2");
    CHECK(diags[0].message.find("Nd4") != std::string::npos);
}

TEST_CASE("position filter narrows by ply, side, and terminality") {
    PositionFilter bad;
    bad.min_ply = 5;
    bad.max_ply = 4;
    auto stream0 = clock_stream(3);
    CHECK_THROWS_AS(sample_positions(stream0, bad, 1), ChessError);

    // An opening-only stream has no position at or past ply 20.
    auto stream1 = load_pgn("tests/data/sample.pgn");
    PositionFilter late;
    late.min_ply = 20;
    CHECK(sample_positions(stream1, late, 10).empty());

    auto stream2 = load_pgn("tests/data/sample.pgn");
    PositionFilter black_only;
    black_only.side_to_move = Color::black;
    black_only.seed = 1;
    auto blacks = sample_positions(stream2, black_only, 100);
    REQUIRE(blacks.size() == 5);
    for (const Board& b : blacks)
        CHECK(b.side_to_move == Color::black);

    std::vector<SourcedPosition> with_mate;
    with_mate.push_back({start_position(), 0, "x"});
    with_mate.push_back(
        {parse_fen("rnb1kbnr/pppp1ppp/8/4p3/6Pq/5P2/PPPPP2P/RNBQKBNR w KQkq - 1 3"),
         4, "x"});
    auto stream3 = PositionStream(std::move(with_mate));
    PositionFilter nonterminal;
    nonterminal.require_nonterminal = true;
    auto alive = sample_positions(stream3, nonterminal, 10);
    REQUIRE(alive.size() == 1);
    CHECK(alive[0] == start_position());
}

TEST_CASE("dedupe keeps the first of each repeated FEN") {
    std::vector<SourcedPosition> items;
    for (int i = 0; i < 6; ++i)
        items.push_back({start_position(), 0, "x"});
    items.push_back({parse_fen("4k3/8/8/3pP3/8/8/8/4K3 w - d6 0 2"), 2, "x"});
    auto stream = PositionStream(std::move(items));
    PositionFilter dedupe;
    dedupe.dedupe_by_fen = true;
    auto out = sample_positions(stream, dedupe, 10);
    CHECK(out.size() == 2);
}

TEST_CASE("sampling is deterministic for a fixed seed") {
    PositionFilter filter;
    filter.seed = 99;
    auto s1 = clock_stream(50);
    auto s2 = clock_stream(50);
    auto a = sample_positions(s1, filter, 7);
    auto b = sample_positions(s2, filter, 7);
    REQUIRE(a.size() == 7);
    CHECK(a == b);

    filter.seed = 100;
    auto s3 = clock_stream(50);
    auto c = sample_positions(s3, filter, 7);
    CHECK(a != c);
}

TEST_CASE("reservoir sampling is uniform over the stream") {
    // 10k single-element samples from a 10-element stream: each element's
    // selection frequency must sit within 0.1 +/- 0.02.
    std::map<int, int> hits;
    const int trials = 10000;
    for (int t = 0; t < trials; ++t) {
        auto stream = clock_stream(10);
        PositionFilter filter;
        filter.seed = static_cast<uint64_t>(t) + 1;
        auto picked = sample_positions(stream, filter, 1);
        REQUIRE(picked.size() == 1);
        hits[picked[0].halfmove_clock]++;
    }
    REQUIRE(hits.size() == 10);
    for (const auto& [clock, count] : hits) {
        double freq = static_cast<double>(count) / trials;
        CAPTURE(clock, freq);
        CHECK(freq > 0.08);
        CHECK(freq < 0.12);
    }
}
