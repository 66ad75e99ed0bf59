#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cogfit/core/error.hpp"

namespace cogfit::corpus {

struct ChoiceSpan {
    std::size_t event = 0;  // index into Transcript::events
    std::string token;

    bool operator==(const ChoiceSpan&) const = default;
};

struct Transcript {
    std::string instruction;
    std::vector<std::string> events;
    std::vector<ChoiceSpan> choice_spans;

    std::vector<std::string> tokens() const {
        std::vector<std::string> out;
        out.reserve(choice_spans.size());
        for (const auto& s : choice_spans) out.push_back(s.token);
        return out;
    }
};

inline constexpr std::string_view kOpenMarker = "<<";
inline constexpr std::string_view kCloseMarker = ">>";

namespace detail {

inline void replace_all(std::string& s, std::string_view from, std::string_view to) {
    std::size_t pos = 0;
    while ((pos = s.find(from, pos)) != std::string::npos) {
        s.replace(pos, from.size(), to);
        pos += to.size();
    }
}

// "$<<$" and "$>>$" (LaTeX-escaped transcripts) collapse to the plain markers.
inline std::string normalize_markers(std::string line) {
    replace_all(line, "$<<$", kOpenMarker);
    replace_all(line, "$>>$", kCloseMarker);
    return line;
}

inline bool is_blank(std::string_view line) {
    return line.find_first_not_of(" \t") == std::string_view::npos;
}

// Extracts marker-enclosed tokens of one (normalised) line.
inline std::vector<std::string> scan_tokens(const std::string& line, std::size_t line_no) {
    std::vector<std::string> tokens;
    std::size_t pos = 0;
    while (true) {
        const std::size_t open = line.find(kOpenMarker, pos);
        const std::size_t stray_close = line.find(kCloseMarker, pos);
        if (open == std::string::npos) {
            if (stray_close != std::string::npos)
                fail(ErrorKind::malformed_transcript,
                     "line " + std::to_string(line_no) + ": '>>' without matching '<<'");
            break;
        }
        if (stray_close != std::string::npos && stray_close < open)
            fail(ErrorKind::malformed_transcript,
                 "line " + std::to_string(line_no) + ": '>>' without matching '<<'");
        const std::size_t start = open + kOpenMarker.size();
        const std::size_t close = line.find(kCloseMarker, start);
        const std::size_t reopen = line.find(kOpenMarker, start);
        if (close == std::string::npos || (reopen != std::string::npos && reopen < close))
            fail(ErrorKind::malformed_transcript,
                 "line " + std::to_string(line_no) + ": '<<' without matching '>>'");
        tokens.push_back(line.substr(start, close - start));
        pos = close + kCloseMarker.size();
    }
    return tokens;
}

}  // namespace detail

/// Splits a transcript into its instruction block (everything before the
/// first blank line) and event lines, and extracts the marked choices.
/// Text without any blank line has no instruction block: every line is an event.
inline Transcript parse_transcript(std::string_view text) {
    if (text.empty()) fail(ErrorKind::empty_input, "transcript is empty");

    std::vector<std::string> lines;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        std::string line(text.substr(start, end - start));
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(detail::normalize_markers(std::move(line)));
        if (end == text.size()) break;
        start = end + 1;
    }

    std::size_t first_event = 0;
    Transcript out;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (detail::is_blank(lines[i])) {
            std::string instruction;
            for (std::size_t k = 0; k < i; ++k) {
                if (k) instruction += '\n';
                instruction += lines[k];
            }
            out.instruction = std::move(instruction);
            first_event = i + 1;
            break;
        }
    }

    for (std::size_t i = 0; i < first_event; ++i) (void)detail::scan_tokens(lines[i], i + 1);
    for (std::size_t i = first_event; i < lines.size(); ++i) {
        if (detail::is_blank(lines[i])) continue;
        auto tokens = detail::scan_tokens(lines[i], i + 1);
        const std::size_t event = out.events.size();
        out.events.push_back(lines[i]);
        for (auto& tok : tokens) out.choice_spans.push_back({event, std::move(tok)});
    }
    return out;
}

}  // namespace cogfit::corpus
