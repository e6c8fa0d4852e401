@problemName Bad
@univariate true
@equalLength true
@seriesLength 3
@classLabel true A B
@data
1,nan,3:A
