#pragma once

#include <filesystem>
#include <istream>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "concede/textproc.hpp"
#include "concede/types.hpp"

namespace concede {

struct Comment {
  std::string id;
  std::string thread_id;
  std::optional<std::string> parent_id;
  std::string author_id;
  std::string text;
  bool is_original_post = false;
  bool delta_awarded = false;
};

/// One occurrence of a target marker with its sentence context.
///
/// `thread_id` is carried so the original post of the thread can be found for the
/// Jaccard feature without re-reading the comment corpus.
struct MarkerInstance {
  std::string id;
  std::string comment_id;
  std::string thread_id;
  Marker marker = Marker::But;
  std::string sentence;
  std::optional<std::string> prev_sentence;
  std::optional<std::string> next_sentence;
  int marker_token_index = 0;
  bool delta_awarded = false;
  Split split = Split::Unlabeled;
  std::optional<Label> gold_label;
  std::vector<Label> crowd_labels;  // empty, or one label per rater

  /// True when no word token precedes the marker in its sentence.
  bool marker_is_sentence_initial() const;
};

struct MarkerCensusRow {
  std::string marker;
  long count_delta = 0;
  long count_no_delta = 0;
};

enum class CorpusFormat { JsonlV1 };

std::optional<CorpusFormat> parse_corpus_format(std::string_view id);

/// Reads a comment corpus. Output is sorted by (thread_id, id); a repeated
/// (id, text) pair is dropped, a repeated id with different text is an error.
std::vector<Comment> ingest(const std::filesystem::path& path,
                            CorpusFormat format = CorpusFormat::JsonlV1);
std::vector<Comment> ingest_jsonl(std::istream& in);

/// Rule-based splitter: breaks after [.!?] followed by whitespace and an
/// uppercase letter or digit, except after a known abbreviation.
std::vector<std::string> segment_sentences(std::string_view text);

/// One instance per marker token occurrence, ordered by comment then position.
std::vector<MarkerInstance> extract_marker_instances(std::span<const Comment> comments,
                                                     std::span<const Marker> markers = kAllMarkers,
                                                     Split split = Split::Unlabeled);

/// The 19 candidate concession markers, in report order.
const std::vector<std::string>& census_markers();

/// Counts every candidate marker by persuasion outcome. Multiword markers are
/// matched longest-first and a token is counted for at most one marker.
std::vector<MarkerCensusRow> marker_census(std::span<const Comment> comments);

/// Tokenized sentences of each thread's original post, keyed by thread id.
std::unordered_map<std::string, std::vector<TokenSequence>> op_sentences_by_thread(
    std::span<const Comment> comments);

}  // namespace concede
