#include "promptclass/prompting.hpp"

#include <cctype>
#include <fstream>

#include "promptclass/error.hpp"
#include "promptclass/text.hpp"

namespace promptclass {

namespace {

constexpr std::string_view kMaskMarker = "[mask]";

bool is_mask_at(std::string_view s, std::size_t pos) {
    if (pos + kMaskMarker.size() > s.size()) return false;
    for (std::size_t i = 0; i < kMaskMarker.size(); ++i) {
        char c = s[pos + i];
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
        if (c != kMaskMarker[i]) return false;
    }
    return true;
}

// "X" counts as the text marker only when whitespace or a string edge
// surrounds it.
bool is_text_marker_at(std::string_view s, std::size_t pos) {
    if (s[pos] != 'X') return false;
    bool left_ok = pos == 0 || std::isspace(static_cast<unsigned char>(s[pos - 1]));
    bool right_ok = pos + 1 == s.size() || std::isspace(static_cast<unsigned char>(s[pos + 1]));
    return left_ok && right_ok;
}

}  // namespace

PromptTemplate PromptTemplate::parse(std::string_view template_string) {
    struct Marker {
        std::size_t pos;
        std::size_t len;
        SegmentKind kind;
    };
    std::vector<Marker> markers;
    std::size_t text_count = 0;
    std::size_t mask_count = 0;

    std::size_t i = 0;
    while (i < template_string.size()) {
        if (is_mask_at(template_string, i)) {
            markers.push_back({i, kMaskMarker.size(), SegmentKind::Mask});
            ++mask_count;
            i += kMaskMarker.size();
        } else if (is_text_marker_at(template_string, i)) {
            markers.push_back({i, 1, SegmentKind::Text});
            ++text_count;
            ++i;
        } else {
            ++i;
        }
    }

    if (text_count == 0) throw InputError("template is missing the text marker \"X\"");
    if (text_count > 1) throw InputError("template has multiple text markers \"X\"");
    if (mask_count == 0) throw InputError("template is missing the mask marker \"[mask]\"");
    if (mask_count > 1) throw InputError("template has multiple mask markers \"[mask]\"");

    PromptTemplate tmpl;
    tmpl.source_ = std::string(template_string);
    std::size_t cursor = 0;
    for (const Marker& m : markers) {
        if (m.pos > cursor) {
            tmpl.segments_.push_back(
                {SegmentKind::Literal, std::string(template_string.substr(cursor, m.pos - cursor))});
        }
        tmpl.segments_.push_back({m.kind, std::string(template_string.substr(m.pos, m.len))});
        cursor = m.pos + m.len;
    }
    if (cursor < template_string.size()) {
        tmpl.segments_.push_back({SegmentKind::Literal, std::string(template_string.substr(cursor))});
    }
    return tmpl;
}

std::vector<std::string> PromptTemplate::read_lines(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open template file: " + path.string());
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(line);
    }
    return lines;
}

PromptTemplate PromptTemplate::load_by_id(const std::filesystem::path& path, int id) {
    std::vector<std::string> lines = read_lines(path);
    if (id < 1 || static_cast<std::size_t>(id) > lines.size()) {
        throw InputError("template id " + std::to_string(id) + " out of range for " + path.string() +
                         " (" + std::to_string(lines.size()) + " lines)");
    }
    return parse(lines[static_cast<std::size_t>(id - 1)]);
}

std::string PromptTemplate::to_string() const {
    std::string out;
    for (const Segment& s : segments_) out += s.content;
    return out;
}

RenderedPrompt render(const PromptTemplate& tmpl, std::string_view input_text,
                      const Tokenizer& tokenizer, RenderInfo* info) {
    std::string trimmed = text::trim(input_text);
    if (trimmed.empty()) throw InputError("cannot render an empty text");

    std::vector<TokenId> start = tokenizer.sequence_start_tokens();
    std::vector<TokenId> end = tokenizer.sequence_end_tokens();

    struct Piece {
        PromptTemplate::SegmentKind kind;
        std::vector<TokenId> tokens;
    };
    std::vector<Piece> pieces;
    std::size_t fixed = start.size() + end.size();
    std::size_t text_tokens = 0;
    for (const auto& seg : tmpl.segments()) {
        switch (seg.kind) {
            case PromptTemplate::SegmentKind::Literal: {
                Piece p{seg.kind, tokenizer.tokenize(seg.content)};
                fixed += p.tokens.size();
                pieces.push_back(std::move(p));
                break;
            }
            case PromptTemplate::SegmentKind::Text: {
                Piece p{seg.kind, tokenizer.tokenize(trimmed)};
                text_tokens = p.tokens.size();
                pieces.push_back(std::move(p));
                break;
            }
            case PromptTemplate::SegmentKind::Mask: {
                pieces.push_back({seg.kind, {tokenizer.mask_token_id()}});
                fixed += 1;
                break;
            }
        }
    }

    if (text_tokens == 0) throw InputError("text produced no tokens under the oracle's tokenizer");

    std::size_t max_len = tokenizer.max_sequence_length();
    if (fixed >= max_len) {
        throw InputError("template plus sequence specials leave no room for text (limit " +
                         std::to_string(max_len) + ")");
    }
    std::size_t budget = max_len - fixed;
    std::size_t kept = std::min(text_tokens, budget);
    if (info != nullptr) {
        info->truncated = kept < text_tokens;
        info->dropped_text_tokens = text_tokens - kept;
    }

    RenderedPrompt out;
    out.source_text = trimmed;
    out.tokens = start;
    for (auto& piece : pieces) {
        if (piece.kind == PromptTemplate::SegmentKind::Text) {
            piece.tokens.resize(kept);
        }
        if (piece.kind == PromptTemplate::SegmentKind::Mask) {
            out.mask_index = out.tokens.size();
        }
        out.tokens.insert(out.tokens.end(), piece.tokens.begin(), piece.tokens.end());
    }
    out.tokens.insert(out.tokens.end(), end.begin(), end.end());
    return out;
}

}  // namespace promptclass
