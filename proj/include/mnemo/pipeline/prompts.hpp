// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace mnemo {

/// Prompt templates with named placeholders ("{summary}", "{fact}", ...).
/// The defaults are built from assets/prompts; a template directory can
/// override any of them with a same-named .txt file.
struct PromptTemplates {
    std::string version;
    std::string extraction;  // {namespace} {summary} {recent} {pair}
    std::string update;      // {namespace} {fact} {candidates}
    std::string summary;     // {summary} {conversation}
    std::string entities;    // {namespace} {text}
    std::string relations;   // {entities} {text}
    std::string resolver;    // {candidate} {conflicts}

    static PromptTemplates defaults();
    static PromptTemplates load(const std::filesystem::path& directory);
};

using TemplateValues = std::vector<std::pair<std::string_view, std::string_view>>;

/// Substitutes "{name}" for every listed name in a single pass. Other
/// braces are copied through untouched and substituted text is never rescanned.
std::string render_template(std::string_view tmpl, const TemplateValues& values);

/// Built-in asset by file stem ("judge", "answer_header", ...). Throws not_found.
const std::string& embedded_asset(std::string_view name);

}  // namespace mnemo
