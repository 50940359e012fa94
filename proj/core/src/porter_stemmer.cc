// Copyright 2026 The delhate Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


// Port of M. F. Porter's reference implementation. Rule order, the handling
// of the measure over b[0..j] and the places where j is (and is not) updated
// follow it exactly, since the published test vocabulary depends on them.

#include <string>
#include <string_view>

#include "delhate/text_prep.h"

namespace delhate {
namespace {

class PorterState {
 public:
  explicit PorterState(std::string_view word) : b_(word) {
    k_ = static_cast<int>(b_.size()) - 1;
  }

  std::string Run() {
    if (k_ <= 1) return b_;
    Step1ab();
    if (k_ > 0) {
      Step1c();
      Step2();
      Step3();
      Step4();
      Step5();
    }
    return b_.substr(0, k_ + 1);
  }

 private:
  bool Cons(int i) const {
    switch (b_[i]) {
      case 'a':
      case 'e':
      case 'i':
      case 'o':
      case 'u':
        return false;
      case 'y':
        return i == 0 ? true : !Cons(i - 1);
      default:
        return true;
    }
  }

  // Number of VC sequences in b[0..j].
  int Measure() const {
    int n = 0;
    int i = 0;
    while (true) {
      if (i > j_) return n;
      if (!Cons(i)) break;
      ++i;
    }
    ++i;
    while (true) {
      while (true) {
        if (i > j_) return n;
        if (Cons(i)) break;
        ++i;
      }
      ++i;
      ++n;
      while (true) {
        if (i > j_) return n;
        if (!Cons(i)) break;
        ++i;
      }
      ++i;
    }
  }

  bool VowelInStem() const {
    for (int i = 0; i <= j_; ++i) {
      if (!Cons(i)) return true;
    }
    return false;
  }

  bool DoubleCons(int j) const {
    if (j < 1) return false;
    if (b_[j] != b_[j - 1]) return false;
    return Cons(j);
  }

  // consonant-vowel-consonant ending at i, last consonant not w, x or y.
  bool Cvc(int i) const {
    if (i < 2 || !Cons(i) || Cons(i - 1) || !Cons(i - 2)) return false;
    const char ch = b_[i];
    return ch != 'w' && ch != 'x' && ch != 'y';
  }

  // On a match sets j to the index before the suffix.
  bool Ends(std::string_view s) {
    const int length = static_cast<int>(s.size());
    if (s.back() != b_[k_]) return false;
    if (length > k_ + 1) return false;
    if (std::string_view(b_).substr(k_ - length + 1, length) != s) {
      return false;
    }
    j_ = k_ - length;
    return true;
  }

  void SetTo(std::string_view s) {
    b_.replace(j_ + 1, std::string::npos, s);
    k_ = j_ + static_cast<int>(s.size());
  }

  void ReplaceIfMeasured(std::string_view s) {
    if (Measure() > 0) SetTo(s);
  }

  void Step1ab() {
    if (b_[k_] == 's') {
      if (Ends("sses")) {
        k_ -= 2;
      } else if (Ends("ies")) {
        SetTo("i");
      } else if (b_[k_ - 1] != 's') {
        --k_;
      }
    }
    if (Ends("eed")) {
      if (Measure() > 0) --k_;
    } else if ((Ends("ed") || Ends("ing")) && VowelInStem()) {
      k_ = j_;
      if (Ends("at")) {
        SetTo("ate");
      } else if (Ends("bl")) {
        SetTo("ble");
      } else if (Ends("iz")) {
        SetTo("ize");
      } else if (DoubleCons(k_)) {
        --k_;
        const char ch = b_[k_];
        if (ch == 'l' || ch == 's' || ch == 'z') ++k_;
      } else if (Measure() == 1 && Cvc(k_)) {
        SetTo("e");
      }
    }
    b_.resize(k_ + 1);
  }

  void Step1c() {
    if (Ends("y") && VowelInStem()) b_[k_] = 'i';
  }

  void Step2() {
    switch (b_[k_ - 1]) {
      case 'a':
        if (Ends("ational")) { ReplaceIfMeasured("ate"); break; }
        if (Ends("tional")) { ReplaceIfMeasured("tion"); break; }
        break;
      case 'c':
        if (Ends("enci")) { ReplaceIfMeasured("ence"); break; }
        if (Ends("anci")) { ReplaceIfMeasured("ance"); break; }
        break;
      case 'e':
        if (Ends("izer")) { ReplaceIfMeasured("ize"); break; }
        break;
      case 'l':
        if (Ends("bli")) { ReplaceIfMeasured("ble"); break; }
        if (Ends("alli")) { ReplaceIfMeasured("al"); break; }
        if (Ends("entli")) { ReplaceIfMeasured("ent"); break; }
        if (Ends("eli")) { ReplaceIfMeasured("e"); break; }
        if (Ends("ousli")) { ReplaceIfMeasured("ous"); break; }
        break;
      case 'o':
        if (Ends("ization")) { ReplaceIfMeasured("ize"); break; }
        if (Ends("ation")) { ReplaceIfMeasured("ate"); break; }
        if (Ends("ator")) { ReplaceIfMeasured("ate"); break; }
        break;
      case 's':
        if (Ends("alism")) { ReplaceIfMeasured("al"); break; }
        if (Ends("iveness")) { ReplaceIfMeasured("ive"); break; }
        if (Ends("fulness")) { ReplaceIfMeasured("ful"); break; }
        if (Ends("ousness")) { ReplaceIfMeasured("ous"); break; }
        break;
      case 't':
        if (Ends("aliti")) { ReplaceIfMeasured("al"); break; }
        if (Ends("iviti")) { ReplaceIfMeasured("ive"); break; }
        if (Ends("biliti")) { ReplaceIfMeasured("ble"); break; }
        break;
      case 'g':
        if (Ends("logi")) { ReplaceIfMeasured("log"); break; }
        break;
      default:
        break;
    }
  }

  void Step3() {
    switch (b_[k_]) {
      case 'e':
        if (Ends("icate")) { ReplaceIfMeasured("ic"); break; }
        if (Ends("ative")) { ReplaceIfMeasured(""); break; }
        if (Ends("alize")) { ReplaceIfMeasured("al"); break; }
        break;
      case 'i':
        if (Ends("iciti")) { ReplaceIfMeasured("ic"); break; }
        break;
      case 'l':
        if (Ends("ical")) { ReplaceIfMeasured("ic"); break; }
        if (Ends("ful")) { ReplaceIfMeasured(""); break; }
        break;
      case 's':
        if (Ends("ness")) { ReplaceIfMeasured(""); break; }
        break;
      default:
        break;
    }
  }

  void Step4() {
    switch (b_[k_ - 1]) {
      case 'a':
        if (Ends("al")) break;
        return;
      case 'c':
        if (Ends("ance")) break;
        if (Ends("ence")) break;
        return;
      case 'e':
        if (Ends("er")) break;
        return;
      case 'i':
        if (Ends("ic")) break;
        return;
      case 'l':
        if (Ends("able")) break;
        if (Ends("ible")) break;
        return;
      case 'n':
        if (Ends("ant")) break;
        if (Ends("ement")) break;
        if (Ends("ment")) break;
        if (Ends("ent")) break;
        return;
      case 'o':
        if (Ends("ion") && j_ >= 0 && (b_[j_] == 's' || b_[j_] == 't')) break;
        if (Ends("ou")) break;
        return;
      case 's':
        if (Ends("ism")) break;
        return;
      case 't':
        if (Ends("ate")) break;
        if (Ends("iti")) break;
        return;
      case 'u':
        if (Ends("ous")) break;
        return;
      case 'v':
        if (Ends("ive")) break;
        return;
      case 'z':
        if (Ends("ize")) break;
        return;
      default:
        return;
    }
    if (Measure() > 1) k_ = j_;
  }

  void Step5() {
    j_ = k_;
    if (b_[k_] == 'e') {
      const int a = Measure();
      if (a > 1 || (a == 1 && !Cvc(k_ - 1))) --k_;
    }
    if (b_[k_] == 'l' && DoubleCons(k_) && Measure() > 1) --k_;
  }

  std::string b_;
  int k_ = 0;
  int j_ = 0;
};

}  // namespace

std::string PorterStem(std::string_view word) {
  return PorterState(word).Run();
}

}  // namespace delhate
