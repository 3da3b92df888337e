#ifndef CHESSFORGE_PROMPTS_INSTRUCTIONS_HPP
#define CHESSFORGE_PROMPTS_INSTRUCTIONS_HPP

namespace chessforge {
namespace prompts {

// Instruction texts are versioned assets: the answer-extraction contract in
// scoring.hpp and these strings specify each other, so a wording change that
// affects parsing must bump the version.
inline constexpr const char* kPromptVersion = "prompts-v1";

inline constexpr const char* kAnswerContractSingle =
    "End your reply with one line of the form:\n"
    "Final Answer: <move>\n"
    "where <move> is a single move in UCI notation (for example e2e4 or "
    "a7a8q).";

inline constexpr const char* kAnswerContractList =
    "End your reply with one line of the form:\n"
    "Final Answer: <move>, <move>, ...\n"
    "listing every move in UCI notation, separated by commas. If there are "
    "no legal moves, write:\n"
    "Final Answer: none";

inline constexpr const char* kPredictMoveInstruction =
    "You are playing chess. Play the best move for the side to move on the "
    "board below.";

inline constexpr const char* kBestChoiceInstruction =
    "You are playing chess. From the candidate moves listed below, choose "
    "the best move for the side to move.";

inline constexpr const char* kWorstChoiceInstruction =
    "You are playing chess. From the candidate moves listed below, choose "
    "the worst move for the side to move.";

inline constexpr const char* kLegalMovesInstruction =
    "You are playing chess. List all legal moves available to the piece "
    "standing on the square named below.";

inline constexpr const char* kOodMateInstruction =
    "You are playing chess. Play a move that delivers checkmate immediately. "
    "There may be more than one; any checkmating move is correct.";

inline constexpr const char* kBestMoveDataInstruction =
    "You are playing chess. Reply with the best move for the side to move "
    "on the board below, in UCI notation, and nothing else.";

inline constexpr const char* kBestLineDataInstruction =
    "You are playing chess. Reply with the line of optimal play from the "
    "board below as space-separated UCI moves, then a final token of the "
    "form 'delta: <signed centipawns>' giving the expected change in the "
    "engine evaluation from the original side to move's perspective "
    "(positive means the position improves for that side).";

inline constexpr const char* kFbaInstruction =
    "Answer the following questions about the chess board below. Answer "
    "each question on its own line, in order, with no extra commentary.";

inline constexpr const char* kVabpInstruction =
    "You are playing chess. Think through the candidate moves on the board "
    "below, then state the chosen move.";

inline constexpr const char* kGuidedVerdictInstruction =
    "You are a strong chess analyst. A candidate move was played on the "
    "begin board, followed by the engine's best replies, reaching the end "
    "board. Reason step by step about the begin board, the line, and the "
    "end board. Then give a verdict on the candidate move's quality: one "
    "line of the form 'Verdict: good', 'Verdict: bad', or 'Verdict: "
    "unclear'.";

inline constexpr const char* kTraceExtractionInstruction =
    "Read the chess reasoning trace below and extract two lists:\n"
    "1. moves: every player move the text references, in UCI notation.\n"
    "2. pieces: every (piece name, board square) pair the text mentions.\n"
    "Reply with nothing but a JSON object of the form\n"
    "{\"moves\": [\"e2e4\"], \"pieces\": [[\"knight\", \"g1\"]]}\n"
    "using empty arrays when a list has no entries.";

} // namespace prompts
} // namespace chessforge

#endif
