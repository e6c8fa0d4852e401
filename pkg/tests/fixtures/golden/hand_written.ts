# hand-written fixture: mixed key casing, blank lines, trailing whitespace
@ProblemName Handmade
@TIMESTAMPS false
@univariate FALSE
@dimensions 2
@equallength true
@serieslength 4
@classlabel true up down 3

@data
1,2,3,4:0.5,0.25,-1e-3,7:up   
4,3,2,1:1.0e2,2,3,4:down
0,0,0,0:1,1,1,1:3
