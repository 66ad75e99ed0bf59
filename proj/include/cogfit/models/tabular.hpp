#pragma once

#include <algorithm>
#include <memory>
#include <string>
#include <vector>

#include "cogfit/models/model.hpp"

namespace cogfit::models {

enum class TabularVariant { rational, lookup };

inline std::string table_name(std::size_t row, std::size_t col) {
    return "theta[" + std::to_string(row) + "][" + std::to_string(col) + "]";
}

/// Table shape read back from a parameter vector laid out by the tabular models.
struct TableShape {
    std::size_t rows = 0;
    std::size_t cols = 0;
};

inline TableShape table_shape(const ParamVector& p) {
    TableShape s;
    while (p.find(table_name(0, s.cols))) ++s.cols;
    if (s.cols == 0) return s;
    while (p.find(table_name(s.rows, 0))) ++s.rows;
    require(p.size() >= s.rows * s.cols && p.find(table_name(s.rows - 1, s.cols - 1)).has_value(),
            ErrorKind::precondition, "parameter table is not rectangular");
    return s;
}

// Softmax over one row of a free table theta. The rational model indexes rows
// by the trial's optimal option (Nc x Nc); the lookup model by trial position (T x Nc).
inline ChoiceDistribution tabular_probs(const ParamVector& params, std::size_t key, TabularVariant variant) {
    const TableShape shape = table_shape(params);
    if (key >= shape.rows)
        fail(ErrorKind::domain, std::string(variant == TabularVariant::rational ? "optimal option " : "trial ") +
                                    std::to_string(key) + " outside table with " + std::to_string(shape.rows) +
                                    " rows");
    std::vector<double> logits(shape.cols);
    std::vector<std::string> labels(shape.cols);
    for (std::size_t c = 0; c < shape.cols; ++c) {
        logits[c] = params[table_name(key, c)];
        labels[c] = std::to_string(c);
    }
    return from_logits(std::move(labels), logits);
}

class TabularAgent final : public Agent {
public:
    TabularAgent(const ParamVector& p, TabularVariant variant)
        : variant_(variant), shape_(table_shape(p)), first_(shape_.cols ? p.index_of(table_name(0, 0)) : 0),
          values_(p.values()) {}

    void logits(const Trial& trial, std::span<double> out) override {
        require_size(trial, out);
        const std::size_t row = row_of(trial);
        for (std::size_t c = 0; c < out.size(); ++c) out[c] = values_[first_ + row * shape_.cols + c];
    }

    void add_logit_gradient(const Trial& trial, std::span<const double> w, std::span<double> grad) override {
        const std::size_t row = row_of(trial);
        for (std::size_t c = 0; c < w.size(); ++c) grad[first_ + row * shape_.cols + c] += w[c];
    }

private:
    std::size_t row_of(const Trial& trial) const {
        if (trial.choice_set.size() != shape_.cols)
            fail(ErrorKind::domain, "trial " + std::to_string(trial.index) + " has " +
                                        std::to_string(trial.choice_set.size()) + " options, table has " +
                                        std::to_string(shape_.cols));
        std::size_t row = trial.index;
        if (variant_ == TabularVariant::rational) {
            const std::string* optimal = trial.tag("optimal");
            if (!optimal)
                fail(ErrorKind::malformed_session,
                     "trial " + std::to_string(trial.index) + ": missing 'optimal' option tag");
            row = trial.option_index(*optimal);
        }
        if (row >= shape_.rows)
            fail(ErrorKind::domain, "row " + std::to_string(row) + " outside table with " +
                                        std::to_string(shape_.rows) + " rows");
        return row;
    }

    TabularVariant variant_;
    TableShape shape_;
    std::size_t first_;
    std::vector<double> values_;
};

class Tabular final : public Model {
public:
    explicit Tabular(TabularVariant variant) : variant_(variant) {}

    std::string_view tag() const override { return variant_ == TabularVariant::rational ? "rational" : "lookup"; }

    std::vector<std::string> parameter_names(std::span<const Session> sessions) const override {
        std::size_t options = 0, trials = 0;
        for (const auto& s : sessions) {
            trials = std::max(trials, s.trials.size());
            for (const auto& t : s.trials) {
                if (options && t.choice_set.size() != options)
                    fail(ErrorKind::malformed_session, "choice set size differs across trials");
                options = t.choice_set.size();
            }
        }
        const std::size_t rows = variant_ == TabularVariant::rational ? options : trials;
        std::vector<std::string> names;
        for (std::size_t r = 0; r < rows; ++r)
            for (std::size_t c = 0; c < options; ++c) names.push_back(table_name(r, c));
        return names;
    }

    std::unique_ptr<Agent> make_agent(const ParamVector& p) const override {
        return std::make_unique<TabularAgent>(p, variant_);
    }

    bool has_analytic_gradient() const override { return true; }

private:
    TabularVariant variant_;
};

}  // namespace cogfit::models
