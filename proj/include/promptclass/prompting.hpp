#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "promptclass/tokenizer.hpp"

namespace promptclass {

// A cloze template with exactly one text slot ("X" as a standalone token)
// and exactly one mask slot ("[mask]", case-insensitive). Immutable after
// parsing; serializing the segments reproduces the source string exactly.
class PromptTemplate {
public:
    enum class SegmentKind { Literal, Text, Mask };

    struct Segment {
        SegmentKind kind;
        std::string content;  // literal text, or the marker as originally spelled
    };

    static PromptTemplate parse(std::string_view template_string);

    // One template per line, referenced by 1-based line number.
    static PromptTemplate load_by_id(const std::filesystem::path& path, int id);
    static std::vector<std::string> read_lines(const std::filesystem::path& path);

    const std::vector<Segment>& segments() const { return segments_; }
    const std::string& source() const { return source_; }
    std::string to_string() const;

private:
    std::vector<Segment> segments_;
    std::string source_;
};

// A token sequence with exactly one mask token, ready for the oracle.
struct RenderedPrompt {
    std::vector<TokenId> tokens;
    std::size_t mask_index = 0;
    std::string source_text;  // the short text inserted into the text slot
};

struct RenderInfo {
    bool truncated = false;
    std::size_t dropped_text_tokens = 0;
};

// Fills the template's text slot with `input_text` and tokenizes. When the
// sequence would exceed the oracle's maximum length, text-slot tokens are
// dropped from their end; template literals and the mask always survive.
RenderedPrompt render(const PromptTemplate& tmpl, std::string_view input_text,
                      const Tokenizer& tokenizer, RenderInfo* info = nullptr);

}  // namespace promptclass
