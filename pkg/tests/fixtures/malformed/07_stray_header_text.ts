@problemName Bad
univariate true
@classLabel true A B
@data
1,2,3:A
