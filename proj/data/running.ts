# running example
atoms a
locations lA lB
directions dA dB
init lA
label lA a
trans lA dA lA
trans lA dB lB
trans lB dA lA
trans lB dB lB
