#include "serlab/llm/prompts.hpp"

#include "serlab/common/error.hpp"

namespace serlab::llm {

namespace {

constexpr std::string_view kCategoricalHead =
    "Predict the emotion label of the following sentence from a podcast recording. Allowed predicted emotions: "
    "['Anger', 'Contempt', 'Disgust', 'Fear', 'Happiness', 'Neutral', 'Sadness', 'Surprise']\n"
    "Transcription: ";
constexpr std::string_view kCategoricalTail =
    "\n"
    "Just predict the answer without explanation.\n"
    "Answer:";

constexpr std::string_view kAttributeHead =
    "Predict the emotional attribute label (valence, arousal, dominance) of the following sentence from a podcast "
    "recording.\n"
    "Allowed predicted ranges are from 1 to 7.\n"
    "Transcription:";
constexpr std::string_view kAttributeTail =
    "\n"
    "Just predict the answer in the format of [arousal, valence, dominance], e.g., [1.0, 2.3, 4.7], without "
    "explanation.\n"
    "Answer:";

std::string fill(std::string_view head, std::string_view transcript, std::string_view tail) {
  if (transcript.empty()) throw ValidationError("prompt: empty transcript");
  std::string out;
  out.reserve(head.size() + transcript.size() + tail.size());
  out.append(head).append(transcript).append(tail);
  return out;
}

}  // namespace

std::string build_categorical_prompt(std::string_view transcript) {
  return fill(kCategoricalHead, transcript, kCategoricalTail);
}

std::string build_attribute_prompt(std::string_view transcript) {
  return fill(kAttributeHead, transcript, kAttributeTail);
}

std::string build_prompt(model::Task task, std::string_view transcript) {
  return task == model::Task::kCategorical ? build_categorical_prompt(transcript)
                                           : build_attribute_prompt(transcript);
}

std::string_view categorical_template() {
  static const std::string t = std::string(kCategoricalHead) + std::string(kCategoricalTail);
  return t;
}

std::string_view attribute_template() {
  static const std::string t = std::string(kAttributeHead) + std::string(kAttributeTail);
  return t;
}

}  // namespace serlab::llm
