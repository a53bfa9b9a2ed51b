#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "barriers/corpus.hpp"

namespace barriers {

struct FeatureConfig {
    std::size_t min_df = 2;      // tokens in fewer documents are dropped
    double max_df_ratio = 0.95;  // tokens in more than this fraction are dropped
    bool use_concepts = false;
    int concept_weight = 1;  // repetitions of each concept token
    bool lowercase = true;
    bool include_title = true;
};

/// Whitespace-delimited chunks with leading and trailing ASCII punctuation
/// stripped; interior punctuation is kept ("U.S.-China" survives intact).
/// Bytes >= 0x80 count as word characters, so UTF-8 text passes through.
/// Lower-casing applies to ASCII letters only. Chunks that strip to nothing
/// (pure punctuation) are dropped; digits are kept.
std::vector<std::string> tokenize(std::string_view text, bool lowercase = true);

/// "CONCEPT::" + final path segment of each concept URI (percent-decoded,
/// ASCII lower-cased), repeated concept_weight times. The reserved prefix
/// keeps concept tokens disjoint from body tokens. Malformed URIs are
/// skipped, with a note in *warnings when given.
std::vector<std::string> concept_tokens(const NewsArticle& article, int concept_weight,
                                        std::vector<std::string>* warnings = nullptr);

/// Full token stream of one article under the config:
/// tokenize(title + " " + body) ++ concept tokens when use_concepts.
std::vector<std::string> document_tokens(const NewsArticle& article, const FeatureConfig& config);

struct Vocabulary {
    std::map<std::string, std::size_t, std::less<>> index;  // token -> column
    std::vector<std::string> tokens;                        // column -> token
    std::vector<std::size_t> df;                            // column -> document frequency
    std::size_t total_documents = 0;

    std::size_t size() const { return tokens.size(); }
    std::uint64_t fingerprint() const;
};

/// Document-frequency filtering (df < min_df or df/N > max_df_ratio drops a
/// token), then columns assigned in lexicographic token order. An empty
/// vocabulary after filtering is fatal (ConfigError).
Vocabulary build_vocabulary(const std::vector<std::vector<std::string>>& documents,
                            const FeatureConfig& config);

/// Sorted sparse vector; zero weights are never stored.
struct SparseVector {
    std::vector<std::pair<std::size_t, double>> entries;  // strictly increasing indices
    std::size_t dim = 0;

    double dot(const SparseVector& other) const;
    double norm() const;
    double value_at(std::size_t column) const;
};

using SparseMatrix = std::vector<SparseVector>;

/// weight(t) = tf * (ln((1+N)/(1+df)) + 1), L2-normalized; out-of-vocabulary
/// tokens are ignored.
SparseVector tfidf_vectorize(const std::vector<std::string>& tokens, const Vocabulary& vocab);
/// Raw in-vocabulary term counts (multinomial naive Bayes input).
SparseVector count_vectorize(const std::vector<std::string>& tokens, const Vocabulary& vocab);

struct ArticleVectors {
    SparseMatrix tfidf;
    SparseMatrix counts;
};

/// Vocabulary must come from the training split only; both splits are then
/// vectorized against it.
Vocabulary build_vocabulary_from_articles(const std::vector<const NewsArticle*>& train_articles,
                                          const FeatureConfig& config);
ArticleVectors vectorize_articles(const std::vector<const NewsArticle*>& articles,
                                  const Vocabulary& vocab, const FeatureConfig& config);

/// One-call form for a single article set (builds the vocabulary from it).
struct FeaturizedDataset {
    Vocabulary vocab;
    ArticleVectors vectors;
};
FeaturizedDataset featurize_dataset(const std::vector<const NewsArticle*>& articles,
                                    const FeatureConfig& config);

/// token \t index \t df, one row per column.
void dump_vocabulary_tsv(const Vocabulary& vocab, std::ostream& out);
/// Header "rows cols nnz", then "row col weight" triples (17 significant digits).
void dump_matrix_coo(const SparseMatrix& matrix, std::ostream& out);

}  // namespace barriers
