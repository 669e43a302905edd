#include <array>

#include "aspect/error.hpp"
#include "aspect/llm_gen.hpp"
#include "aspect/text.hpp"

namespace aspect::llm_gen {

using corpus::Language;

namespace {

// Few-shot annotation prompts, reproduced as used for the GPT-4 data
// requests (including the EN prompt's "Malay comment" wording and the CN
// prompt's repeated closing instruction).

constexpr std::string_view kMsPrompt =
    R"(Comment Aspect Terms (ATs) mean the main aspects that the comment expresses opinions on, and Emotional Polarity (EP) means the main emotion of the comment. I need you to help me annotate main ATs for each Malay comment (no more than 5 ATs), when no ATs are detected, label "NA". For each comment, annotate EP with Negative (N), Positive (P), and Neutral (C). Here shows four annotation examples: Example 1. Bn nak sgt slangor tu bukanya apa..terliur tgk s'gor negeri plg maju hasil negeri billion2 tapi um ... hahaha...ni meols setuju..yelah..selangor kan paling kaya..rizab berbilion billion.. sebab tak dpt nak sakau dr selangor tu yang fed gomen sakit...zaman dedulu masa bn pegang bolehlah sakau sikit [ATs: BN, hasil negara, rizab Selangor, fed gomen | EP: N] Example 2. hahaha...ni meols setuju..yelah..selangor kan paling kaya..rizab berbilion billion.. sebab tak dpt ... kansss..meleleh air liur bn slangor nak merompak duit hasil negeri tapi apakan daya tak dapat.. tapi ada macai desperete dok kait dgn terowong ajaib bagai yg lgsg takde kaitan dgn slangor.. [ATs: rizab selangor, merompak wang | EP: N] Example 3. The best actor goes to... Kesian owner moto. JPJ Dah nampak. takpe kasi chan lepas tu lepas GE claim balik. [ATs: motorcycle owner, JPJ | EP: C] Example 4. Kimarkkkk ko ler jamal tongkol  [ATs: Jamal | EP: N])"
    "\n"
    R"(Annotate the following comment "{comment}" and return the result as the format of the examples.)";

constexpr std::string_view kCnPrompt =
    R"(Comment Aspect Terms (ATs) mean the main aspects that the comment expresses opinions on, and Emotional Polarity (EP) means the main emotion of the comment. I need you to help me annotate main ATs for each Chinese comment (no more than 5 ATs), when no ATs are detected, label "NA". For each comment, annotate EP with Negative (N), Positive (P), and Neutral (C). Here are three annotation examples:)"
    "\n"
    R"(Annotate the following comment "..." and return the result as the format of the examples. Example 1. 太假了……我家那里几乎每人都中了只是没人统计而已 [ATs: 新冠统计 | EP: N] 2. 刚才浙江日增100万转到这条新闻成2983起，真的是太不要脸了，还零死亡，现在就我们那里殡仪馆死人都全部放在地上，殡仪馆24小时工作。 [ATs: 网络新闻, 浙江新增病例, 死亡率 | EP: N] Example 3. 呵呵。。。。两声应该明白啥意思 [ATs: NA | EP: C])"
    "\n"
    R"(Annotate the following comment "{comment}" and return the result as the format of the examples.)";

constexpr std::string_view kIdPrompt =
    R"(Comment Aspect Terms (ATs) mean the main aspects that the comment expresses opinions on, and Emotional Polarity (EP) means the main emotion of the comment. I need you to help me annotate main ATs for each Indonesian comment (no more than 5 ATs), when no ATs are detected, label "NA". For each comment, annotate EP with Negative (N), Positive (P), and Neutral (C). Here shows three annotation examples: Example 1. jumlah nuklir yang dimilik sekutu NATO, China dan Rusia lebih dari cukup untuk bikin bumi kiamat [ATs: NATO, Tiongkok, Rusia, senjata nuklir | EP: N] Example 2. @kampret.strez booster gak ngaruh utk org yg udah kena + di vaksin. itu dari riset empiris dari israel bbrp bulan lalu. gw sih rada skeptis utk ambil booster toh mulai bulan ke 3 antibody udh mulai nurun dan perlu booster lagi dlm 6 bulan.  [ATs: Efek booster, penelitian di Israel | EP: C] Example 3. kalau di Indonesia kebalik yah di beberapa daerah ada yg maksa kapir pake jilbab dgn alasan t0l0l pula macam biar gak digigit nyamuk  [AT: Indonesia, hijab, nyamuk | EP: C])"
    "\n"
    R"(Annotate the following comment "{comment}" and return the result as the format of the examples.)";

constexpr std::string_view kEnPrompt =
    R"(Comment Aspect Terms (ATs) mean the main aspects that the comment expresses opinions on, and Emotional Polarity (EP) means the main emotion of the comment. I need you to help me annotate main ATs for each Malay comment (no more than 5 ATs), when no ATs are detected, label "NA". For each comment, annotate EP with Negative (N), Positive (P), and Neutral (C). Here shows four annotation examples: Example 1. What it says is that food banks are used to providing support for those in the poorest 10% of the population but now that segment is creeping up so that more people are needing help. [ATs: food bank, poor singaporeans | EP: N] Example 2. Actually, most [people have savings - in the form of CPF]. [ATs: CPF savings | EP: P] Example 3. And yet every 2 or 3 cars on the road is either bmw or merc [ATs: NA | EP: C])"
    "\n"
    R"(Annotate the following comment "{comment}" and return the result as the format of the examples.)";

constexpr std::string_view kInstructionTail =
    R"( If no opinion is expressed, the aspect terms should be "NA". Annotate the aspect terms of the following comment: {comment})";

constexpr std::string_view kLimitInstructionTail =
    R"( If no opinion is expressed, the aspect terms should be "NA". Annotate the following comments with 1 or 2 aspect terms: {comment})";

// Locally written descriptions.
constexpr std::array<std::string_view, 30> kCatDescriptions = {
    "Aspect terms are the main targets that a comment expresses an opinion about.",
    "An aspect term names the object at the center of the commenter's opinion.",
    "Aspect terms capture what the comment is mainly talking about and judging.",
    "The aspect terms of a comment are the entities or topics its opinion is aimed at.",
    "Aspect terms identify the focus of the opinion, whether stated directly or implied.",
    "An aspect term is a short phrase for the thing the commenter praises, criticizes or discusses.",
    "Aspect terms summarize the key subjects on which the comment takes a stance.",
    "The aspect terms are the people, organizations, events or issues the opinion concerns.",
    "Aspect terms point to the core objects of the opinion expressed in the comment.",
    "Aspect terms describe the primary topics a commenter reacts to.",
    "An aspect term is a concise label for the target of an opinion in the comment.",
    "Aspect terms are the central focuses of the opinion, explicit or implicit.",
    "The aspect terms of a comment list what the writer has a view about.",
    "Aspect terms mark the subjects that carry the opinion of the comment.",
    "Aspect terms are brief noun phrases naming the targets of the commenter's attitude.",
    "An aspect term identifies what a social media comment is evaluating.",
    "Aspect terms are the key points of discussion that receive an opinion in the comment.",
    "Aspect terms name the main issues the commenter is reacting to.",
    "Aspect terms are the opinion targets that best summarize a comment.",
    "The aspect terms of a comment are the objects its sentiment is directed at.",
    "Aspect terms extract the essential topics that the comment's opinion centers on.",
    "An aspect term is a phrase naming an entity or issue the comment comments on.",
    "Aspect terms are the focal subjects of the comment's opinion, in a few words each.",
    "Aspect terms are the most important things a comment expresses opinions about.",
    "Aspect terms identify the targets of opinion so that similar comments can be grouped.",
    "The aspect terms name what the commenter agrees with, opposes or questions.",
    "Aspect terms are short descriptions of the opinion targets found in the comment.",
    "Aspect terms capture the central objects of discussion in an opinionated comment.",
    "An aspect term is the main subject on which the comment gives a judgment.",
    "Aspect terms are the key topics the comment's opinion is built around.",
};

}  // namespace

void PromptTemplate::validate() const {
  std::size_t count = 0;
  for (auto pos = body.find(kPlaceholder); pos != std::string::npos;
       pos = body.find(kPlaceholder, pos + kPlaceholder.size())) {
    ++count;
  }
  if (count != 1) {
    throw Error(ErrorKind::InvalidArgument,
                "prompt template must contain exactly one {comment} placeholder");
  }
  if (limit_variant && body.find(kLimitPhrase) == std::string::npos) {
    throw Error(ErrorKind::InvalidArgument, "limit template must request 1 or 2 aspect terms");
  }
}

PromptTemplate annotation_template(Language language) {
  std::string_view body;
  switch (language) {
    case Language::EN: body = kEnPrompt; break;
    case Language::CN: body = kCnPrompt; break;
    case Language::MS: body = kMsPrompt; break;
    case Language::ID: body = kIdPrompt; break;
  }
  return {language, std::string(body), false};
}

std::span<const std::string_view> cat_descriptions() { return kCatDescriptions; }

PromptTemplate instruction_template(Language language, std::size_t description_index,
                                    bool limit_variant) {
  if (description_index >= kCatDescriptions.size()) {
    throw Error(ErrorKind::InvalidArgument, "description index out of range");
  }
  std::string body(kCatDescriptions[description_index]);
  body += limit_variant ? kLimitInstructionTail : kInstructionTail;
  return {language, std::move(body), limit_variant};
}

std::string instruction_prompt(const corpus::Comment& comment, bool limit_variant) {
  const auto index = text::fnv1a64(comment.id) % kCatDescriptions.size();
  return render_prompt(instruction_template(comment.language, index, limit_variant), comment);
}

std::string render_prompt(const PromptTemplate& tmpl, const corpus::Comment& comment) {
  tmpl.validate();
  if (tmpl.language != comment.language) {
    throw Error(ErrorKind::LanguageMismatch,
                "template language " + std::string(corpus::to_string(tmpl.language)) +
                    " does not match comment language " +
                    std::string(corpus::to_string(comment.language)));
  }
  std::string out = tmpl.body;
  out.replace(out.find(kPlaceholder), kPlaceholder.size(), comment.text);
  return out;
}

}  // namespace aspect::llm_gen
