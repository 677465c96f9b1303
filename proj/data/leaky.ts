# o copies the secret h chosen in the first step; l holds initially
atoms l h o
locations start sec0 sec1
directions d0 d1
init start
label start l
label sec1 h o
trans start d0 sec0
trans start d1 sec1
trans sec0 d0 sec0
trans sec0 d1 sec0
trans sec1 d0 sec1
trans sec1 d1 sec1
