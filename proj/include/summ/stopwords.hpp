#pragma once

#include <set>
#include <sstream>
#include <string>

namespace summ {

// The classic 127-word English stop list. Override with a user-supplied
// file (one token per line) when a different list is wanted.
inline const std::set<std::string>& default_stopwords() {
  static const std::set<std::string> words = [] {
    static const char* kList =
        "a about above after again against all am an and any are as at be "
        "because been before being below between both but by can cannot could did "
        "do does doing down during each few for from further had has have "
        "having he her here hers herself him himself his how i if in into is "
        "it its itself me more most must my myself no nor not of off on once only "
        "or other ought our ours ourselves out over own same she should so "
        "some such than that the their theirs them themselves then there "
        "these they this those through to too under until up very was we were "
        "what when where which while who whom why will with would you your "
        "yours yourself yourselves";
    std::set<std::string> s;
    std::istringstream in(kList);
    std::string w;
    while (in >> w) s.insert(w);
    return s;
  }();
  return words;
}

inline std::set<std::string> load_stopwords(std::istream& in) {
  std::set<std::string> s;
  std::string w;
  while (in >> w) s.insert(w);
  return s;
}

}  // namespace summ
