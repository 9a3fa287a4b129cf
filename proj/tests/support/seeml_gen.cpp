#include "seeml_gen.hpp"

namespace byrne::testing {

namespace {

const std::vector<std::string> kWords{"ball", "pass", "Keane", "shoots", "goal", "what", "a", "save",
                                      "&", "<wow>", "caf\xC3\xA9", "\"quoted\"", "it's", "3-2"};

Node random_element(Rng& rng) {
    switch (rng.uniform(0, 12)) {
        case 0: return Node::make_element("seg");
        case 1: return Node::make_element("np");
        case 2: return Node::make_element("w", {{"pos", rng.chance(0.5) ? "n" : "v"}});
        case 3: return Node::make_element("EMPH");
        case 4: return Node::make_element("RATE", {{"SPEED", rng.pick<std::string>({"+10%", "-5%", "+2.5%", "50%"})}});
        case 5: return Node::make_element("PITCH", {{"BASE", rng.pick<std::string>({"+10%", "-20%", "120"})}});
        case 6:
            return Node::make_element("PITCH", {{"BASE", rng.pick<std::string>({"+1", "-3"})},
                                                {"RANGE", rng.pick<std::string>({"+5", "-1"})}});
        case 7: return Node::make_element("VOLUME", {{"LEVEL", rng.pick<std::string>({"+30%", "-10%", "loud"})}});
        case 8:
            return Node::make_element("EXPR", {{"NAME", rng.pick<std::string>({"smile", "anger", "fear"})},
                                               {"LEVEL", rng.pick<std::string>({"0.5", "0.9"})}});
        case 9: return Node::make_element("AU", {{"NUM", rng.pick<std::string>({"6", "12", "4"})}});
        case 10: return Node::make_element("AFFECT", {{"TYPE", rng.pick<std::string>({"happiness", "fear"})}});
        case 11: return Node::make_element("su");
        default: return Node::make_element("vp");
    }
}

std::vector<Node> random_children(Rng& rng, const SeemlGenOptions& opt, int depth, std::vector<Node>& open);

Node random_node(Rng& rng, const SeemlGenOptions& opt, int depth, std::vector<Node>& open) {
    const double text_p = depth >= opt.max_depth ? 1.0 : 0.35;
    if (rng.chance(text_p)) {
        std::string t = rng.pick(kWords);
        if (rng.chance(0.7)) t += " ";
        if (rng.chance(0.3)) t = " " + t;
        return Node::make_text(t);
    }
    if (opt.empty_elements && rng.chance(0.08)) {
        switch (rng.uniform(0, 2)) {
            case 0: return Node::make_element("BREAK");
            case 1: return Node::make_element("EVENT", {{"NAME", "hiccup"}});
            default: return Node::make_element("AU", {{"NUM", "26"}});
        }
    }
    // Re-open an enclosing tag often so identical nesting is common.
    Node e = random_element(rng);
    if (!open.empty() && rng.chance(0.45)) {
        const Node& like = rng.pick(open);
        e = Node::make_element(like.tag, like.attrs);
        if (like.tag == "RATE" && rng.chance(0.5)) e.attrs["SPEED"] = rng.pick<std::string>({"+10%", "-5%", "+1%"});
    }
    open.push_back(Node::make_element(e.tag, e.attrs));
    e.children = random_children(rng, opt, depth + 1, open);
    open.pop_back();
    return e;
}

std::vector<Node> random_children(Rng& rng, const SeemlGenOptions& opt, int depth, std::vector<Node>& open) {
    std::vector<Node> out;
    const int n = rng.uniform(1, opt.max_children);
    for (int i = 0; i < n; ++i) out.push_back(random_node(rng, opt, depth, open));
    return out;
}

}  // namespace

SeemlDocument random_seeml(Rng& rng, const SeemlGenOptions& options) {
    std::vector<Node> open;
    SeemlDocument doc;
    doc.roots = random_children(rng, options, 0, open);
    normalize(doc.roots);
    return doc;
}

}  // namespace byrne::testing
