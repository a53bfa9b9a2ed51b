#include "barriers/features.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <unordered_map>

#include "barriers/errors.hpp"
#include "barriers/io_util.hpp"

namespace barriers {

namespace {

bool is_ascii_space(unsigned char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

// ASCII punctuation; anything else (alnum or >= 0x80) is a word character.
bool is_word_char(unsigned char c) {
    if (c >= 0x80) {
        return true;
    }
    return std::isalnum(c) != 0;
}

char lower_ascii(char c) {
    return static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
}

std::optional<std::string> percent_decode(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (text[i] != '%') {
            out.push_back(text[i]);
            continue;
        }
        if (i + 2 >= text.size() || !std::isxdigit(static_cast<unsigned char>(text[i + 1])) ||
            !std::isxdigit(static_cast<unsigned char>(text[i + 2]))) {
            return std::nullopt;
        }
        const auto hex = [](char c) {
            return c <= '9' ? c - '0' : (std::tolower(static_cast<unsigned char>(c)) - 'a' + 10);
        };
        out.push_back(static_cast<char>(hex(text[i + 1]) * 16 + hex(text[i + 2])));
        i += 2;
    }
    return out;
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text, bool lowercase) {
    std::vector<std::string> tokens;
    std::size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && is_ascii_space(static_cast<unsigned char>(text[i]))) {
            ++i;
        }
        std::size_t end = i;
        while (end < text.size() && !is_ascii_space(static_cast<unsigned char>(text[end]))) {
            ++end;
        }
        std::size_t lo = i, hi = end;
        while (lo < hi && !is_word_char(static_cast<unsigned char>(text[lo]))) {
            ++lo;
        }
        while (hi > lo && !is_word_char(static_cast<unsigned char>(text[hi - 1]))) {
            --hi;
        }
        if (lo < hi) {
            std::string token(text.substr(lo, hi - lo));
            if (lowercase) {
                std::transform(token.begin(), token.end(), token.begin(), lower_ascii);
            }
            tokens.push_back(std::move(token));
        }
        i = end;
    }
    return tokens;
}

std::vector<std::string> concept_tokens(const NewsArticle& article, int concept_weight,
                                        std::vector<std::string>* warnings) {
    std::vector<std::string> tokens;
    for (const std::string& uri : article.concepts) {
        const auto warn = [&] {
            if (warnings != nullptr) {
                warnings->push_back("malformed concept URI skipped: " + uri);
            }
        };
        // Path = URI up to any query or fragment; the concept name is its
        // final segment.
        std::string_view path = uri;
        path = path.substr(0, path.find_first_of("?#"));
        const auto slash = path.rfind('/');
        if (slash == std::string_view::npos || slash + 1 >= path.size()) {
            warn();
            continue;
        }
        const auto decoded = percent_decode(path.substr(slash + 1));
        if (!decoded || decoded->empty()) {
            warn();
            continue;
        }
        std::string name = *decoded;
        std::transform(name.begin(), name.end(), name.begin(), lower_ascii);
        for (int r = 0; r < concept_weight; ++r) {
            tokens.push_back("CONCEPT::" + name);
        }
    }
    return tokens;
}

std::vector<std::string> document_tokens(const NewsArticle& article, const FeatureConfig& config) {
    std::string text;
    if (config.include_title) {
        text = article.title + " " + article.body;
    } else {
        text = article.body;
    }
    std::vector<std::string> tokens = tokenize(text, config.lowercase);
    if (config.use_concepts) {
        auto extra = concept_tokens(article, config.concept_weight);
        tokens.insert(tokens.end(), std::make_move_iterator(extra.begin()),
                      std::make_move_iterator(extra.end()));
    }
    return tokens;
}

std::uint64_t Vocabulary::fingerprint() const {
    std::string buf;
    for (std::size_t col = 0; col < tokens.size(); ++col) {
        buf += tokens[col];
        buf += '\t';
        buf += std::to_string(col);
        buf += '\t';
        buf += std::to_string(df[col]);
        buf += '\n';
    }
    return fnv1a64(buf);
}

Vocabulary build_vocabulary(const std::vector<std::vector<std::string>>& documents,
                            const FeatureConfig& config) {
    if (documents.empty()) {
        throw ConfigError("cannot build a vocabulary from zero documents");
    }
    std::map<std::string, std::size_t, std::less<>> doc_freq;
    {
        std::vector<std::string_view> seen;
        for (const auto& doc : documents) {
            seen.assign(doc.begin(), doc.end());
            std::sort(seen.begin(), seen.end());
            seen.erase(std::unique(seen.begin(), seen.end()), seen.end());
            for (std::string_view token : seen) {
                auto it = doc_freq.find(token);
                if (it == doc_freq.end()) {
                    doc_freq.emplace(std::string(token), 1);
                } else {
                    ++it->second;
                }
            }
        }
    }
    const auto n_docs = static_cast<double>(documents.size());
    Vocabulary vocab;
    vocab.total_documents = documents.size();
    for (const auto& [token, df] : doc_freq) {  // map iteration = lexicographic order
        if (df < config.min_df) {
            continue;
        }
        if (static_cast<double>(df) > config.max_df_ratio * n_docs) {
            continue;
        }
        vocab.index.emplace(token, vocab.tokens.size());
        vocab.tokens.push_back(token);
        vocab.df.push_back(df);
    }
    if (vocab.tokens.empty()) {
        throw ConfigError(
            "vocabulary is empty after document-frequency filtering; lower min_df (" +
            std::to_string(config.min_df) + ") or raise max_df_ratio");
    }
    return vocab;
}

double SparseVector::dot(const SparseVector& other) const {
    double sum = 0.0;
    auto a = entries.begin();
    auto b = other.entries.begin();
    while (a != entries.end() && b != other.entries.end()) {
        if (a->first < b->first) {
            ++a;
        } else if (b->first < a->first) {
            ++b;
        } else {
            sum += a->second * b->second;
            ++a;
            ++b;
        }
    }
    return sum;
}

double SparseVector::norm() const {
    double sum = 0.0;
    for (const auto& [col, w] : entries) {
        sum += w * w;
    }
    return std::sqrt(sum);
}

double SparseVector::value_at(std::size_t column) const {
    const auto it = std::lower_bound(
        entries.begin(), entries.end(), column,
        [](const auto& entry, std::size_t col) { return entry.first < col; });
    return (it != entries.end() && it->first == column) ? it->second : 0.0;
}

namespace {

std::vector<std::pair<std::size_t, double>> term_counts(const std::vector<std::string>& tokens,
                                                        const Vocabulary& vocab) {
    std::unordered_map<std::size_t, double> counts;
    for (const std::string& token : tokens) {
        const auto it = vocab.index.find(token);
        if (it != vocab.index.end()) {
            counts[it->second] += 1.0;
        }
    }
    std::vector<std::pair<std::size_t, double>> entries(counts.begin(), counts.end());
    std::sort(entries.begin(), entries.end());
    return entries;
}

}  // namespace

SparseVector tfidf_vectorize(const std::vector<std::string>& tokens, const Vocabulary& vocab) {
    SparseVector v;
    v.dim = vocab.size();
    v.entries = term_counts(tokens, vocab);
    const double n = 1.0 + static_cast<double>(vocab.total_documents);
    for (auto& [col, w] : v.entries) {
        const double idf = std::log(n / (1.0 + static_cast<double>(vocab.df[col]))) + 1.0;
        w *= idf;
    }
    const double norm = v.norm();
    if (norm > 0.0) {
        for (auto& [col, w] : v.entries) {
            w /= norm;
        }
    }
    return v;
}

SparseVector count_vectorize(const std::vector<std::string>& tokens, const Vocabulary& vocab) {
    SparseVector v;
    v.dim = vocab.size();
    v.entries = term_counts(tokens, vocab);
    return v;
}

Vocabulary build_vocabulary_from_articles(const std::vector<const NewsArticle*>& train_articles,
                                          const FeatureConfig& config) {
    std::vector<std::vector<std::string>> docs;
    docs.reserve(train_articles.size());
    for (const NewsArticle* article : train_articles) {
        docs.push_back(document_tokens(*article, config));
    }
    return build_vocabulary(docs, config);
}

ArticleVectors vectorize_articles(const std::vector<const NewsArticle*>& articles,
                                  const Vocabulary& vocab, const FeatureConfig& config) {
    ArticleVectors out;
    out.tfidf.reserve(articles.size());
    out.counts.reserve(articles.size());
    for (const NewsArticle* article : articles) {
        const auto tokens = document_tokens(*article, config);
        out.tfidf.push_back(tfidf_vectorize(tokens, vocab));
        out.counts.push_back(count_vectorize(tokens, vocab));
    }
    return out;
}

FeaturizedDataset featurize_dataset(const std::vector<const NewsArticle*>& articles,
                                    const FeatureConfig& config) {
    FeaturizedDataset out;
    out.vocab = build_vocabulary_from_articles(articles, config);
    out.vectors = vectorize_articles(articles, out.vocab, config);
    return out;
}

void dump_vocabulary_tsv(const Vocabulary& vocab, std::ostream& out) {
    for (std::size_t col = 0; col < vocab.size(); ++col) {
        out << vocab.tokens[col] << '\t' << col << '\t' << vocab.df[col] << '\n';
    }
}

void dump_matrix_coo(const SparseMatrix& matrix, std::ostream& out) {
    std::size_t nnz = 0;
    for (const SparseVector& row : matrix) {
        nnz += row.entries.size();
    }
    const std::size_t cols = matrix.empty() ? 0 : matrix.front().dim;
    out << matrix.size() << ' ' << cols << ' ' << nnz << '\n';
    for (std::size_t r = 0; r < matrix.size(); ++r) {
        for (const auto& [col, w] : matrix[r].entries) {
            out << r << ' ' << col << ' ' << format_g17(w) << '\n';
        }
    }
}

}  // namespace barriers
