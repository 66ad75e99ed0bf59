#pragma once

#include <charconv>
#include <cmath>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "cogfit/core/error.hpp"
#include "cogfit/corpus/session.hpp"
#include "cogfit/corpus/transcript.hpp"

namespace cogfit::corpus {

struct TranscriptTemplate {
    std::string id;
    std::vector<std::string> experiment_ids;
    std::function<std::string(const Session&)> render;
};

namespace detail {

inline std::string format_number(double v) {
    if (std::isfinite(v) && v == std::round(v) && std::abs(v) < 1e15)
        return std::to_string(static_cast<long long>(v));
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

inline std::string marked(const std::string& label) {
    if (label.empty() || label.find('\n') != std::string::npos ||
        label.find(kOpenMarker) != std::string::npos || label.find(kCloseMarker) != std::string::npos ||
        label.find('<') != std::string::npos || label.find('>') != std::string::npos)
        fail(ErrorKind::malformed_session, "option label '" + label + "' cannot be rendered inside markers");
    return std::string(kOpenMarker) + label + std::string(kCloseMarker);
}

inline std::string join_and(const std::vector<std::string>& labels) {
    std::string out;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (i) out += (i + 1 == labels.size()) ? " and " : ", ";
        out += labels[i];
    }
    return out;
}

inline std::string bits(const std::vector<double>& cues) {
    std::string out = "[";
    for (std::size_t i = 0; i < cues.size(); ++i) {
        if (i) out += ' ';
        out += format_number(cues[i]);
    }
    return out + "]";
}

inline std::string render_horizon(const Session& s) {
    const auto& labels = s.trials.front().choice_set;
    std::string text;
    text += "You are participating in multiple games involving two slot machines, labeled " +
            join_and(labels) + ".\n";
    text += "The two slot machines are different across different games.\n";
    text += "Each time you choose a slot machine, you get some points.\n";
    text += "You choose a slot machine by pressing the corresponding key.\n";
    text += "Each slot machine tends to pay out about the same amount of points on average.\n";
    text += "Your goal is to choose the slot machines that will give you the most points across the experiment.\n";
    text += "The first 4 trials in each game are instructed trials where you will be told which slot machine to choose.\n";
    text += "After these instructed trials, you will have the freedom to choose for either 1 or 6 trials.\n";

    std::size_t i = 0;
    std::size_t game = 0;
    while (i < s.trials.size()) {
        const std::string* block = s.trials[i].tag("block");
        std::size_t end = i + 1;
        while (end < s.trials.size()) {
            const std::string* b = s.trials[end].tag("block");
            if ((block == nullptr) != (b == nullptr) || (block && *block != *b)) break;
            ++end;
        }
        ++game;
        text += "\nGame " + std::to_string(game) + ". There are " + std::to_string(end - i) +
                " trials in this game.\n";
        for (; i < end; ++i) {
            const Trial& t = s.trials[i];
            const std::string points =
                t.feedback ? " and get " + format_number(*t.feedback) + " points" : std::string();
            if (t.instructed)
                text += "You are instructed to press " + t.chosen + points + ".\n";
            else
                text += "You press " + marked(t.chosen) + points + ".\n";
        }
    }
    return text;
}

inline std::string render_two_step(const Session& s) {
    std::string text;
    text += "You will be presented with pairs of spaceships.\n";
    text += "Each spaceship usually flies to one planet and occasionally to the other.\n";
    text += "You can take a spaceship by pressing the corresponding key.\n";
    text += "Each planet has two aliens on it and each alien has its own space treasure mine.\n";
    text += "When you arrive at a planet, you ask one of its aliens for space treasure by pressing the corresponding key.\n";
    text += "The quality of each alien's mine will change during the game.\n";
    text += "Your goal is to get as much treasure as possible.\n\n";
    for (std::size_t i = 0; i < s.trials.size(); ++i) {
        const Trial& t = s.trials[i];
        if (t.instructed) continue;
        if (t.state_tag && *t.state_tag != "0") {
            // second stage without a preceding first stage on the same line
            text += "You are on planet " + *t.state_tag + " with aliens " + join_and(t.choice_set) +
                    ". You press " + marked(t.chosen) + ".";
            if (t.feedback) text += " You find " + format_number(*t.feedback) + " pieces of space treasure.";
            text += '\n';
            continue;
        }
        text += "You are presented with spaceships " + join_and(t.choice_set) + ". You press " +
                marked(t.chosen) + ".";
        if (i + 1 < s.trials.size() && s.trials[i + 1].state_tag && *s.trials[i + 1].state_tag != "0") {
            const Trial& second = s.trials[++i];
            text += " You end up on planet " + *second.state_tag + ". You see aliens " +
                    join_and(second.choice_set) + ". You press " + marked(second.chosen) + ".";
            if (second.feedback)
                text += " You find " + format_number(*second.feedback) + " pieces of space treasure.";
        }
        text += '\n';
    }
    return text;
}

inline std::string render_multi_attribute(const Session& s) {
    const auto& labels = s.trials.front().choice_set;
    std::string text;
    text += "You are repeatedly presented with two options, labeled " + join_and(labels) + ".\n";
    text += "Each option represents a fictitious product and you have to infer which product is superior in terms of quality.\n";
    text += "You select a product by pressing the corresponding key.\n";
    text += "For each decision, you are provided with four expert ratings (with 1 representing a positive and 0 representing a negative rating).\n";
    text += "The four experts differ in their validity.\n";
    text += "The ratings of experts are given in descending order of their validity (having validities of 90%, 80%, 70%, and 60%).\n\n";
    for (const Trial& t : s.trials) {
        for (const auto& label : t.choice_set)
            text += "Product " + label + " ratings: " + bits(t.vector("cues:" + label)) + ". ";
        text += "You press " + marked(t.chosen) + ".\n";
    }
    return text;
}

}  // namespace detail

inline const std::vector<TranscriptTemplate>& transcript_templates() {
    static const std::vector<TranscriptTemplate> registry{
        {"horizon.v1", {"horizon", "bandit"}, detail::render_horizon},
        {"two_step.v1", {"two_step"}, detail::render_two_step},
        {"multi_attribute.v1", {"multi_attribute"}, detail::render_multi_attribute},
    };
    return registry;
}

/// First registered template for an experiment id, or empty if none.
inline std::string default_template(std::string_view experiment_id) {
    for (const auto& t : transcript_templates())
        for (const auto& e : t.experiment_ids)
            if (e == experiment_id) return t.id;
    return {};
}

inline std::string render_transcript(const Session& session, std::string_view template_id) {
    for (const auto& t : transcript_templates()) {
        if (t.id != template_id) continue;
        bool serves = false;
        for (const auto& e : t.experiment_ids) serves = serves || e == session.experiment_id;
        if (!serves)
            fail(ErrorKind::unknown_template, "template '" + std::string(template_id) +
                                                  "' is not registered for experiment '" +
                                                  session.experiment_id + "'");
        validate(session);
        return t.render(session);
    }
    fail(ErrorKind::unknown_template, "no template named '" + std::string(template_id) + "'");
}

}  // namespace cogfit::corpus
