@problemName Bad
@univariate true
@equalLength true
@seriesLength 3
@classLabel true A B
@data
1,2,3:A
4,x,6:B
