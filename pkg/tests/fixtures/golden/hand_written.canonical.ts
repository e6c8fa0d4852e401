@problemName Handmade
@timeStamps false
@missing false
@univariate false
@dimensions 2
@equalLength true
@seriesLength 4
@classLabel true up down 3
@data
1.0,2.0,3.0,4.0:0.5,0.25,-0.001,7.0:up
4.0,3.0,2.0,1.0:100.0,2.0,3.0,4.0:down
0.0,0.0,0.0,0.0:1.0,1.0,1.0,1.0:3
