#include "kgrank/keywords.hpp"

namespace kgrank {

// Standard English function words plus the fragments our tokenizer produces
// from contractions ("don't" -> don, t).
const std::unordered_set<std::string>& stopword_set() {
    static const std::unordered_set<std::string> words = {
        "a",       "about",   "above",    "after",   "again",      "against", "ain",
        "all",     "am",      "an",       "and",     "any",        "are",     "aren",
        "as",      "at",      "be",       "because", "been",       "before",  "being",
        "below",   "between", "both",     "but",     "by",         "can",     "cannot",
        "could",   "couldn",  "d",        "did",     "didn",       "do",      "does",
        "doesn",   "doing",   "don",      "down",    "during",     "each",    "few",
        "for",     "from",    "further",  "had",     "hadn",       "has",     "hasn",
        "have",    "haven",   "having",   "he",      "her",        "here",    "hers",
        "herself", "him",     "himself",  "his",     "how",        "i",       "if",
        "in",      "into",    "is",       "isn",     "it",         "its",     "itself",
        "just",    "ll",      "m",        "me",      "more",       "most",    "mustn",
        "my",      "myself",  "needn",    "no",      "nor",        "not",     "now",
        "o",       "of",      "off",      "on",      "once",       "only",    "or",
        "other",   "our",     "ours",     "ourselves", "out",      "over",    "own",
        "re",      "s",       "same",     "she",     "should",     "shouldn", "so",
        "some",    "such",    "t",        "than",    "that",       "the",     "their",
        "theirs",  "them",    "themselves", "then",  "there",      "these",   "they",
        "this",    "those",   "through",  "to",      "too",        "under",   "until",
        "up",      "ve",      "very",     "was",     "wasn",       "we",      "were",
        "weren",   "what",    "when",     "where",   "which",      "while",   "who",
        "whom",    "why",     "will",     "with",    "won",        "would",   "wouldn",
        "y",       "you",     "your",     "yours",   "yourself",   "yourselves",
    };
    return words;
}

bool is_stopword(const std::string& token) { return stopword_set().count(token) > 0; }

}  // namespace kgrank
